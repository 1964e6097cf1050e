"""Phase-space evolution of the mirror's Wigner function.

    dW/dt = -(p/M) W_x + M W_ren^2 x W_p + d_pp W_pp + d_xp W_xp + 2 gamma (p W)_p

on a periodic rectangular grid.  Each step is Strang-split:

    advection(dt/2) . dissipation(dt) . advection(dt/2),

with advection itself split into exact shears (x-shear, p-shear, x-shear)
applied as FFT phase ramps, and the dissipative part (diffusion and
conservative drift) advanced by Heun's method with centered stencils.
Both pieces conserve the grid sum of W to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coefficients import CoefficientTrace, WignerCoefficients
from .params import GridSpec

ADVECTION_CFL = 0.9
DIFFUSION_BOUND = 0.45
DRIFT_BOUND = 0.9
BOUNDARY_CELLS = 4


class StabilityError(RuntimeError):
    """A step would violate one of the documented explicit-scheme bounds."""

    def __init__(self, bound: str, value: float, limit: float):
        self.bound = bound
        super().__init__(f"{bound} = {value:.4g} exceeds {limit:g}")


class GridUnderResolved(ValueError):
    pass


class BoundaryMassExceeded(RuntimeError):
    pass


class InsufficientDecay(RuntimeError):
    pass


@dataclass(frozen=True)
class WignerState:
    x: np.ndarray
    p: np.ndarray
    W: np.ndarray  # shape (n_x, n_p)
    t: float = 0.0
    coeffs: WignerCoefficients | None = None

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    def integral(self, f=None) -> float:
        vals = self.W if f is None else self.W * f
        return float(vals.sum() * self.dx * self.dp)


@dataclass(frozen=True)
class CatStateSpec:
    x0: float
    p0: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if self.x0 < 0 or self.p0 < 0:
            raise ValueError("separations x0, p0 must be >= 0")
        if not self.delta > 0:
            raise ValueError("packet width delta must be positive")


def packet(x, p, x0, p0, delta, hbar):
    """Wigner function of a minimum-uncertainty packet centred at (x0, p0)."""
    return np.exp(-((x - x0) ** 2) / delta**2 - ((p - p0) * delta / hbar) ** 2) / (np.pi * hbar)


def cat_state(spec: CatStateSpec, grid: GridSpec, hbar: float = 1.0) -> WignerState:
    """Even superposition of packets at +-(x0/2, p0/2), normalized on the grid."""
    x, p = grid.phase_space()
    dx, dp = x[1] - x[0], p[1] - p[0]
    checks = [("delta", spec.delta, dx), ("hbar/delta", hbar / spec.delta, dp)]
    if spec.x0 > 0:
        checks.append(("momentum fringe 2 pi hbar/x0", 2 * np.pi * hbar / spec.x0, dp))
    if spec.p0 > 0:
        checks.append(("position fringe 2 pi hbar/p0", 2 * np.pi * hbar / spec.p0, dx))
    for name, length, cell in checks:
        if length < 4 * cell:
            raise GridUnderResolved(f"{name} = {length:.4g} spans fewer than 4 cells of {cell:.4g}")
    X, P = np.meshgrid(x, p, indexing="ij")
    a, b, d = spec.x0 / 2, spec.p0 / 2, spec.delta
    W = packet(X, P, a, b, d, hbar) + packet(X, P, -a, -b, d, hbar)
    W = W + 2.0 * packet(X, P, 0.0, 0.0, d, hbar) * np.cos((P * spec.x0 - spec.p0 * X) / hbar)
    W = W / (W.sum() * dx * dp)
    return WignerState(x, p, W)


def gaussian_state(grid: GridSpec, x0: float = 0.0, p0: float = 0.0, delta: float = 1.0, hbar: float = 1.0) -> WignerState:
    x, p = grid.phase_space()
    X, P = np.meshgrid(x, p, indexing="ij")
    W = packet(X, P, x0, p0, delta, hbar)
    return WignerState(x, p, W / (W.sum() * (x[1] - x[0]) * (p[1] - p[0])))


# --- stepping -------------------------------------------------------------


_RAMPS: dict = {}


def _ramp(n: int, d: float, coords: np.ndarray, scale: float) -> np.ndarray:
    """exp(-i k c scale) for the real-FFT wavenumbers k of an axis of n points."""
    key = (n, d, coords.size, float(coords[0]), float(coords[-1]), scale)
    r = _RAMPS.get(key)
    if r is None:
        if len(_RAMPS) > 32:
            _RAMPS.clear()
        k = 2.0 * np.pi * np.fft.rfftfreq(n, d)
        r = _RAMPS[key] = np.exp(-1j * np.outer(k, coords) * scale)
    return r


def _x_shear(W, x, p, tau, M):
    # W(x, p) <- W(x - p tau / M, p)
    F = np.fft.rfft(W, axis=0)
    F *= _ramp(x.size, x[1] - x[0], p, tau / M)
    return np.fft.irfft(F, n=x.size, axis=0)


def _p_shear(W, x, p, tau, M, omega_sq):
    # W(x, p) <- W(x, p + M w^2 x tau)
    F = np.fft.rfft(W, axis=1)
    F *= _ramp(p.size, p[1] - p[0], x, -M * omega_sq * tau).T
    return np.fft.irfft(F, n=p.size, axis=1)


def _advect(W, x, p, tau, M, omega_sq):
    W = _x_shear(W, x, p, 0.5 * tau, M)
    W = _p_shear(W, x, p, tau, M, omega_sq)
    return _x_shear(W, x, p, 0.5 * tau, M)


def _dissipation_rate(W, p, dx, dp, c: WignerCoefficients):
    out = np.zeros_like(W)
    if c.d_pp:
        out += c.d_pp * (np.roll(W, -1, 1) - 2.0 * W + np.roll(W, 1, 1)) / dp**2
    if c.d_xp:
        Wp = np.roll(W, -1, 1) - np.roll(W, 1, 1)
        out += c.d_xp * (np.roll(Wp, -1, 0) - np.roll(Wp, 1, 0)) / (4.0 * dx * dp)
    if c.gamma:
        F = p[None, :] * W
        out += 2.0 * c.gamma * (np.roll(F, -1, 1) - np.roll(F, 1, 1)) / (2.0 * dp)
    return out


def stability_numbers(state: WignerState, c: WignerCoefficients, dt: float, M: float) -> dict:
    dx, dp = state.dx, state.dp
    pmax = float(np.max(np.abs(state.p)))
    # the shears are exact phase ramps; the x-advection number is kept as the
    # documented bound so that no fringe is carried more than a cell per step
    return {
        "advection CFL |p|max dt/(M dx)": pmax * dt / (M * dx),
        "diffusion number (|d_pp|/dp^2 + |d_xp|/(2 dx dp)) dt": dt * (abs(c.d_pp) / dp**2 + abs(c.d_xp) / (2 * dx * dp)),
        "drift number 2|gamma| |p|max dt/dp": 2.0 * abs(c.gamma) * pmax * dt / dp,
    }


_LIMITS = (ADVECTION_CFL, DIFFUSION_BOUND, DRIFT_BOUND)


def max_stable_dt(state: WignerState, c: WignerCoefficients, M: float) -> float:
    nums = stability_numbers(state, c, 1.0, M)
    rates = [v / lim for v, lim in zip(nums.values(), _LIMITS) if v > 0]
    return 1.0 / max(rates) if rates else np.inf


def step(state: WignerState, coeffs: WignerCoefficients, dt: float, M: float) -> WignerState:
    """One Strang step; raises :class:`StabilityError` naming the violated bound."""
    for (name, value), limit in zip(stability_numbers(state, coeffs, dt, M).items(), _LIMITS):
        if value >= limit:
            raise StabilityError(name, value, limit)
    x, p = state.x, state.p
    W = _advect(state.W, x, p, 0.5 * dt, M, coeffs.omega_ren_sq)
    if coeffs.d_pp or coeffs.d_xp or coeffs.gamma:
        k1 = _dissipation_rate(W, p, state.dx, state.dp, coeffs)
        k2 = _dissipation_rate(W + dt * k1, p, state.dx, state.dp, coeffs)
        W = W + 0.5 * dt * (k1 + k2)
    W = _advect(W, x, p, 0.5 * dt, M, coeffs.omega_ren_sq)
    return WignerState(x, p, W, state.t + dt, coeffs)


def boundary_mass(state: WignerState) -> float:
    b = BOUNDARY_CELLS
    W = np.abs(state.W)
    inner = W[b:-b, b:-b].sum()
    return float((W.sum() - inner) / W.sum())


# --- driving --------------------------------------------------------------


def _coefficients_at(source, t: float) -> WignerCoefficients:
    if isinstance(source, WignerCoefficients):
        return source
    trace, signs, params = source
    return signs.apply(trace.at(t), params)


@dataclass
class EvolutionResult:
    times: list = field(default_factory=list)
    records: list = field(default_factory=list)
    final: WignerState | None = None
    steps: int = 0
    dt: float = 0.0
    indefinite_steps: int = 0  # steps run with an indefinite diffusion matrix


def evolve(
    initial: WignerState,
    coeffs,
    horizon: float,
    M: float,
    *,
    dt: float | None = None,
    every: int = 1,
    observers: tuple[Callable[[WignerState], None], ...] = (),
    boundary_tol: float | None = 1e-6,
    safety: float = 0.8,
) -> EvolutionResult:
    """Evolve to ``initial.t + horizon`` recording :func:`observables` every ``every`` steps.

    ``coeffs`` is either constant :class:`WignerCoefficients` or a tuple
    (CoefficientTrace, SignConvention, params) interpolated linearly at each
    step midpoint.  dt defaults to ``safety`` times the tightest bound at the
    start, rounded so that an integer number of steps spans the horizon.
    """
    if isinstance(coeffs, tuple):
        trace = coeffs[0]
        if not isinstance(trace, CoefficientTrace) or initial.t + horizon > trace.t[-1] + 1e-12:
            raise ValueError("coefficient trace does not cover the horizon")
        # the worst case over the trace sets dt
        probes = [_coefficients_at(coeffs, float(s)) for s in np.linspace(initial.t, initial.t + horizon, 64)]
    else:
        probes = [coeffs]
    if dt is None:
        dt = safety * min(max_stable_dt(initial, c, M) for c in probes)
        if not np.isfinite(dt):
            dt = horizon / 100
    n = max(1, int(np.ceil(horizon / dt - 1e-9)))
    dt = horizon / n
    res = EvolutionResult(dt=dt)
    state = initial

    def record(s):
        res.times.append(s.t)
        res.records.append(observables(s))
        for obs in observers:
            obs(s)

    record(state)
    for i in range(n):
        c = _coefficients_at(coeffs, state.t + 0.5 * dt)
        # [[0, d_xp/2], [d_xp/2, d_pp]] is positive semidefinite only if d_xp = 0 and d_pp >= 0
        if c.d_xp != 0.0 or c.d_pp < 0.0:
            res.indefinite_steps += 1
        state = step(state, c, dt, M)
        if boundary_tol is not None and boundary_mass(state) > boundary_tol:
            raise BoundaryMassExceeded(f"boundary mass {boundary_mass(state):.3g} at t = {state.t:.4g}")
        if (i + 1) % every == 0 or i == n - 1:
            record(state)
    res.final = state
    res.steps = n
    return res


# --- diagnostics ----------------------------------------------------------


def fringe_component(state: WignerState, wavenumber: float) -> complex:
    """int dp P(p) e^{i k p} of the momentum marginal P(p) = int W dx."""
    P = state.W.sum(axis=0) * state.dx
    return complex(np.sum(P * np.exp(1j * wavenumber * state.p)) * state.dp)


def observables(state: WignerState, fringe_wavenumber: float | None = None) -> dict:
    X, P = state.x[:, None], state.p[None, :]
    norm = state.integral()
    mx = state.integral(X) / norm
    mp = state.integral(P) / norm
    rec = {
        "t": state.t,
        "norm": norm,
        "mean_x": mx,
        "mean_p": mp,
        "var_x": state.integral((X - mx) ** 2) / norm,
        "var_p": state.integral((P - mp) ** 2) / norm,
        "cov_xp": state.integral((X - mx) * (P - mp)) / norm,
        "negativity": float(np.maximum(0.0, -state.W).sum() * state.dx * state.dp),
    }
    if fringe_wavenumber is not None:
        rec["fringe"] = abs(fringe_component(state, fringe_wavenumber))
    return rec


def energy(state: WignerState, M: float, omega_sq: float) -> float:
    X, P = state.x[:, None], state.p[None, :]
    return state.integral(P**2 / (2 * M) + 0.5 * M * omega_sq * X**2) / state.integral()


@dataclass(frozen=True)
class DecoherenceReport:
    times: np.ndarray
    visibility: np.ndarray
    negativity: np.ndarray
    t_xx_fit: float
    t_xx_predicted: float  # hbar / (|D_PP^s| x0^2)
    t_relax: float  # 1 / |Gamma^s|
    ratio_fit: float  # t_xx_fit / t_xx_predicted
    t_xx_over_t_r: float
    t_xx_over_t_r_formula: float  # hbar / (M W x0^2 z(W))


def decoherence_report(
    times,
    visibility,
    negativity,
    *,
    d_pp_s: float,
    gamma_s: float,
    spec: CatStateSpec,
    M: float,
    Omega: float,
    z: float,
    hbar: float = 1.0,
    floor: float = np.exp(-1.0),
) -> DecoherenceReport:
    """Fit V(t) = exp(-t / t_xx) to the visibility up to its first drop below ``floor``^2."""
    times = np.asarray(times, dtype=float)
    v = np.asarray(visibility, dtype=float)
    v = v / v[0]
    if v.min() > floor:
        raise InsufficientDecay(f"visibility only fell to {v.min():.3g}; need one e-fold")
    stop = int(np.argmax(v < floor**2)) if np.any(v < floor**2) else v.size
    keep = slice(0, max(stop, 3))
    slope = np.polyfit(times[keep] - times[0], np.log(v[keep]), 1)[0]
    t_fit = -1.0 / slope
    pred = hbar / (abs(d_pp_s) * spec.x0**2)
    t_r = 1.0 / abs(gamma_s) if gamma_s else np.inf
    # hbar Gamma / (D_PP x0^2) with D_PP = M W z Gamma
    formula = hbar / (M * Omega * spec.x0**2 * z)
    return DecoherenceReport(
        times, v, np.asarray(negativity, dtype=float), t_fit, pred, t_r, t_fit / pred, t_fit / t_r, formula,
    )
