"""Scattering of a plane wave off the static mirror (bilinear idf-field model)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .params import GridSpec, PhysicalParams


class BracketNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class ScatteringTable:
    omega: np.ndarray
    T: np.ndarray  # complex transmission amplitude
    R: np.ndarray  # complex reflection amplitude

    @property
    def transmittance(self) -> np.ndarray:
        return np.abs(self.T) ** 2

    @property
    def reflectance(self) -> np.ndarray:
        return np.abs(self.R) ** 2

    def rows(self):
        for w, t, r in zip(self.omega, self.T, self.R):
            yield (w, t.real, t.imag, r.real, r.imag, abs(t) ** 2, abs(r) ** 2)


CSV_HEADER = ("omega", "re_T", "im_T", "re_R", "im_R", "abs_T_sq", "abs_R_sq")


def f_factor(omega, omega0: float, plasma_frequency: float):
    """F(w) = (w / Omega_p) (1 - (w / w0)^2)."""
    omega = np.asarray(omega, dtype=float)
    return (omega / plasma_frequency) * (1.0 - (omega / omega0) ** 2)


def scattering(omega, params: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Transmission and reflection amplitudes (T, R) at real frequency ``omega``."""
    omega = np.asarray(omega, dtype=float)
    p = params
    a = 2.0 * p.m * omega * (p.omega0**2 - omega**2)
    denom = a - 1j * p.lam**2 * p.c
    return a / denom, 1j * p.lam**2 * p.c / denom


def spectral_scan(grid: GridSpec, params: PhysicalParams, omega=None) -> ScatteringTable:
    w = grid.omegas() if omega is None else np.asarray(omega, dtype=float)
    T, R = scattering(w, params)
    return ScatteringTable(w, T, R)


@dataclass(frozen=True)
class Crossover:
    omega_star: float | None  # documented root: smallest root above omega0
    roots: tuple[float, ...]  # every positive root of F^2 = 1 below the scan limit


def crossover_frequency(
    params: PhysicalParams,
    cutoff: float,
    *,
    n_scan: int = 4000,
    rtol: float = 1e-10,
) -> Crossover:
    """Roots of F^2(w) = 1, i.e. |T|^2 = |R|^2 = 1/2.

    Scans a geometric grid on [1e-3 w0, cutoff] for sign changes and refines
    each by bisection.
    """
    w0, wp = params.omega0, params.plasma_frequency

    def g(w):
        return float(f_factor(w, w0, wp) ** 2 - 1.0)

    scan = np.geomspace(1e-3 * w0, cutoff, n_scan)
    vals = f_factor(scan, w0, wp) ** 2 - 1.0
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        a, b = scan[i], scan[i + 1]
        roots.append(bisect(g, a, b, xtol=1e-300, rtol=rtol, maxiter=500))
    if not roots:
        raise BracketNotFound(f"no root of F^2 = 1 below cutoff {cutoff:g}")
    above = [r for r in roots if r > w0]
    return Crossover(omega_star=min(above) if above else None, roots=tuple(roots))


def reflection_window(params: PhysicalParams, centre: float, *, level: float = 0.5) -> tuple[float, float]:
    """Contiguous interval around ``centre`` where |R|^2 > level (F^2 < 1/level - 1).

    Edges are found by bisection on F^2 = 1/level - 1 walking outward from
    ``centre``; the lower edge stops at 0.
    """
    w0, wp = params.omega0, params.plasma_frequency
    thresh = 1.0 / level - 1.0

    def h(w):
        return float(f_factor(w, w0, wp) ** 2 - thresh)

    if h(centre) >= 0:
        raise ValueError("centre is not inside a reflection window")

    def edge(direction):
        step = 1e-3 * w0
        a = centre
        while True:
            b = a + direction * step
            if b <= 0:
                return 0.0
            if h(b) > 0:
                lo, hi = sorted((a, b))
                return bisect(h, lo, hi, rtol=1e-12)
            a, step = b, step * 1.5

    return edge(-1.0), edge(+1.0)
