"""Band-limited Fourier sums on the half-offset frequency grid.

Convention: f~(w) = int dt e^{+i w t} f(t),  f(t) = (1/2pi) int dw e^{-i w t} f~(w).
"""

from __future__ import annotations

import numpy as np

_CHUNK = 512


def inverse(omega: np.ndarray, spectrum: np.ndarray, t: np.ndarray, d_omega: float) -> np.ndarray:
    """f(t) = (d_omega / 2pi) sum_j f~(w_j) exp(-i w_j t), evaluated by direct summation."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    spectrum = np.asarray(spectrum, dtype=complex)
    out = np.empty(t.shape, dtype=complex)
    for s in range(0, t.size, _CHUNK):
        tt = t[s : s + _CHUNK]
        out[s : s + _CHUNK] = np.exp(-1j * np.outer(tt, omega)) @ spectrum
    return out * d_omega / (2.0 * np.pi)


def forward_trapezoid(t: np.ndarray, f: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """f~(w) = int dt e^{i w t} f(t) by the trapezoidal rule over the sampled window."""
    w = np.full(t.shape, t[1] - t[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return np.exp(1j * np.outer(omega, t)) @ (w * f)


def edge_taper(omega: np.ndarray, cutoff: float, width: float) -> np.ndarray:
    """Raised-cosine roll-off over cutoff - width <= |w| <= cutoff, 1 inside, 0 beyond.

    A hard band edge leaves a sin(cutoff t)/t tail in time; the roll-off makes
    it decay like 1/t^3 without touching the spectrum below cutoff - width.
    """
    a = np.abs(np.asarray(omega, dtype=float))
    if width <= 0:
        return (a <= cutoff).astype(float)
    x = np.clip((a - (cutoff - width)) / width, 0.0, 1.0)
    return np.where(a > cutoff, 0.0, 0.5 * (1.0 + np.cos(np.pi * x)))
