"""Slow, independent reference computations used to freeze expected values.

Nothing here shares quadrature code with the package: spectra come from the
analytic bath formulas and the closed-form G~, integrated with adaptive
``scipy.integrate.quad`` on the exact band geometry.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp

from dcemirror.baths import minus_dissipation, minus_noise, plus_dissipation, plus_noise, thermal_factor
from dcemirror.params import PhysicalParams
from dcemirror.response import green_symbol


def transmittance_from_f(omega, params: PhysicalParams):
    """|T|^2 = F^2 / (1 + F^2) with F = (w / Omega_p)(1 - w^2 / w0^2)."""
    F = (omega / params.plasma_frequency) * (1.0 - (omega / params.omega0) ** 2)
    return F**2 / (1.0 + F**2)


def _pair_integrand(w, wp, params, cutoff, which):
    x = np.array([wp])
    wpl = np.array([w - wp])
    nm, mm = minus_noise(x, params, cutoff)[0], minus_dissipation(x, params, cutoff)[0]
    npl, mpl = plus_noise(wpl, params)[0], plus_dissipation(wpl, params)[0]
    gg = green_symbol(x, params, cutoff)[0] * green_symbol(-x, params, cutoff)[0]
    K = 2.0 * params.c**2 * params.lam**2 / params.m**2
    if which == "n":
        return float((K * (npl * nm - mpl * mm) * gg).real)
    return float((K * (mpl * nm + npl * mm) * gg / 1j).real)


def _breakpoints(lo, hi, edge):
    """Interval cuts on [lo, hi], graded geometrically towards ``edge``."""
    pts = [lo, hi]
    for k in range(1, 13):
        for s in (1, -1):
            v = edge + s * 10.0**-k
            if lo < v < hi:
                pts.append(v)
    return sorted(set(pts))


def mirror_spectrum_quad(w: float, params: PhysicalParams, cutoff: float, which: str = "n") -> float:
    """int dw'/2pi n(w, w') (or m) by adaptive quadrature over each band piece."""
    ir = params.ir_cutoff
    lo_p, hi_p = w - cutoff, w + cutoff  # (+) support
    total = 0.0
    for a, b, edge in ((-cutoff, -ir, -ir), (ir, cutoff, ir)):
        a, b = max(a, lo_p), min(b, hi_p)
        if a >= b:
            continue
        pts = _breakpoints(a, b, edge)
        if a < w < b:
            pts = sorted(set(pts + [w]))
        for u, v in zip(pts[:-1], pts[1:]):
            total += quad(lambda x: _pair_integrand(w, x, params, cutoff, which), u, v,
                          limit=400, epsabs=0.0, epsrel=1e-10)[0]
    return total / (2.0 * math.pi)


def free_oscillator(t, omega0: float):
    return np.sin(omega0 * t) / omega0


def harmonic_period_return(W0, x, p, M, omega_sq):
    """Exact phase-space rotation by one full period is the identity."""
    return W0


def relaxation_ode(t_end, gamma, x0=0.0, p0=1.0):
    """<p>(t) under pure drift d<p>/dt = -2 gamma <p>, integrated with solve_ivp."""
    sol = solve_ivp(lambda t, y: -2.0 * gamma * y, (0, t_end), [p0], rtol=1e-12, atol=1e-14, dense_output=True)
    return sol


def zeta(w, params):
    return float(thermal_factor(np.array([w]), params)[0])
