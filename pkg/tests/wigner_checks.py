"""Exactly solvable Wigner flows shared by the unit and acceptance tests."""

import numpy as np

from dcemirror.coefficients import WignerCoefficients
from dcemirror.params import GridSpec
from dcemirror.wigner import evolve, gaussian_state, observables

GRID = GridSpec()  # 256 x 256 on [-16, 16) x [-8, 8)


def rotation_return(dt: float, M: float = 1.0, Omega: float = 1.0):
    """RMS of W(period) - W(0) relative to RMS W(0) for pure harmonic flow.

    M Omega = 1 keeps the orbit circular in (x, p) units and inside the grid.
    """
    s = gaussian_state(GRID, x0=3.0, p0=1.0, delta=1.0)
    c = WignerCoefficients(0.0, 0.0, 0.0, Omega**2)
    period = 2 * np.pi / Omega
    res = evolve(s, c, period, M, dt=dt, every=10**9)
    return float(np.sqrt(np.mean((res.final.W - s.W) ** 2)) / np.sqrt(np.mean(s.W**2)))


def diffusion_slope(d_pp: float = 0.05, horizon: float = 10.0):
    """Measured dVar(p)/dt against the exact 2 d_pp."""
    s = gaussian_state(GRID, delta=1.0)
    c = WignerCoefficients(d_pp, 0.0, 0.0, 0.0)
    res = evolve(s, c, horizon, 10.0, every=10**9)
    v0, v1 = observables(s)["var_p"], observables(res.final)["var_p"]
    return (v1 - v0) / horizon, 2 * d_pp, abs(res.final.integral() - s.integral())


def drift_efold(gamma: float = 0.1, horizon: float = 5.0):
    """Measured e-fold time of <p> under pure drift against 1/(2 gamma)."""
    s = gaussian_state(GRID, p0=3.0, delta=1.0)
    c = WignerCoefficients(0.0, 0.0, gamma, 0.0)
    res = evolve(s, c, horizon, 1e6, every=10**9)
    p0, p1 = observables(s)["mean_p"], observables(res.final)["mean_p"]
    return horizon / np.log(p0 / p1), 1 / (2 * gamma), abs(res.final.integral() - s.integral())


# the orbit of M = 10, Omega = 0.5 stretches p by M Omega = 5 relative to x
ENERGY_GRID = GridSpec(x_min=-4.0, x_max=4.0, p_min=-20.0, p_max=20.0, n_x=128, n_p=256)


def energy_drift(coeffs, M: float, periods: int = 10, x0: float = 2.0):
    """Relative energy change of a cat state (ground-state-width packets) over ``periods``."""
    from dcemirror.wigner import CatStateSpec, cat_state, energy

    w2 = coeffs.omega_ren_sq
    s = cat_state(CatStateSpec(x0, 0.0, float(np.sqrt(1.0 / (M * np.sqrt(w2))))), ENERGY_GRID)
    res = evolve(s, coeffs, periods * 2 * np.pi / np.sqrt(w2), M, every=10**9)
    return abs(energy(res.final, M, w2) / energy(s, M, w2) - 1), abs(res.final.integral() - s.integral())
