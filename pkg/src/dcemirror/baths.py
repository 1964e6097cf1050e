"""Noise and dissipation kernels of the (+) and (-) field baths.

Spectra follow the continuum limit of the discrete mode sums, with the band
limit ``cutoff`` as the only UV regulator.  The (-) bath additionally carries
the infrared edge ``params.ir_cutoff``.

Normalizations (derived from the sums, omega_n = 2 pi c n / L):

* (+) bath, per unit quantization length:
  nu+~(w) = z(w) w / (4 c^3),  mu+~(w) = -i w / (4 c^3),
  nu+(t) = (L / 2pi) int dw nu+~(w) e^{-i w t}.
* (-) bath, L-independent:
  nu-~(w) = z(w) c lam^2 / (2 w),  mu-~(w) = -i c lam^2 / (2 w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import transforms
from .params import GridSpec, PhysicalParams, derive_scales


def thermal_factor(omega, params: PhysicalParams):
    """z(w) = coth(hbar w / 2 k_B T); sign(w) at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if params.T == 0:
        return np.sign(omega)
    if np.any(omega == 0):
        raise ValueError("thermal factor is singular at omega = 0 for T > 0")
    with np.errstate(over="ignore"):  # T -> 0+ overflows to +-inf, where tanh = +-1
        x = params.hbar * omega / (2.0 * params.kB * params.T)
    return 1.0 / np.tanh(x)


def omega_z(omega, params: PhysicalParams):
    """w z(w), continuous through w = 0 (limit 2 k_B T / hbar)."""
    omega = np.asarray(omega, dtype=float)
    out = np.empty(omega.shape)
    zero = omega == 0
    out[zero] = 2.0 * params.kB * params.T / params.hbar
    out[~zero] = omega[~zero] * thermal_factor(omega[~zero], params)
    return out


def plus_noise(omega, params: PhysicalParams):
    return omega_z(omega, params) / (4.0 * params.c**3)


def plus_dissipation(omega, params: PhysicalParams):
    return -1j * np.asarray(omega, dtype=float) / (4.0 * params.c**3)


def minus_amplitude(params: PhysicalParams) -> float:
    """A in mu-~(w) = -i A / w."""
    return params.c * params.lam**2 / 2.0


def minus_band_mask(omega, params: PhysicalParams, cutoff: float):
    a = np.abs(np.asarray(omega, dtype=float))
    return (a >= params.ir_cutoff) & (a <= cutoff)


def minus_noise(omega, params: PhysicalParams, cutoff: float):
    omega = np.asarray(omega, dtype=float)
    mask = minus_band_mask(omega, params, cutoff)
    out = np.zeros(omega.shape)
    w = omega[mask]
    out[mask] = minus_amplitude(params) * thermal_factor(w, params) / w
    return out


def minus_dissipation(omega, params: PhysicalParams, cutoff: float):
    omega = np.asarray(omega, dtype=float)
    mask = minus_band_mask(omega, params, cutoff)
    out = np.zeros(omega.shape, dtype=complex)
    out[mask] = -1j * minus_amplitude(params) / omega[mask]
    return out


@dataclass(frozen=True)
class KernelPair:
    label: str  # "plus", "minus" or "mirror"
    omega: np.ndarray
    nu_tilde: np.ndarray
    mu_tilde: np.ndarray
    t: np.ndarray
    nu_t: np.ndarray
    mu_t: np.ndarray
    fdr_residual: float
    meta: dict = field(default_factory=dict)


def _fdr_residual(omega, nu_tilde, mu_tilde, params) -> float:
    nz = omega != 0
    z = thermal_factor(omega[nz], params)
    return float(np.max(np.abs(nu_tilde[nz] - 1j * z * mu_tilde[nz]), initial=0.0))


def plus_bath_spectra(grid: GridSpec, params: PhysicalParams) -> KernelPair:
    w = grid.omegas()
    nu = plus_noise(w, params).astype(complex)
    mu = plus_dissipation(w, params)
    t = grid.times()
    scale = params.L  # nu+(t) = (L / 2pi) int nu+~ e^{-iwt}
    nu_t = scale * transforms.inverse(w, nu, t, grid.d_omega).real
    mu_t = scale * transforms.inverse(w, mu, t, grid.d_omega).real
    return KernelPair(
        "plus", w, nu, mu, t, nu_t, mu_t,
        fdr_residual=_fdr_residual(w, nu, mu, params),
        meta={"per_length": True, "c_power_vs_printed": params.c**2},
    )


def minus_bath_spectra(grid: GridSpec, params: PhysicalParams) -> KernelPair:
    w = grid.omegas()
    nu = minus_noise(w, params, grid.cutoff).astype(complex)
    mu = minus_dissipation(w, params, grid.cutoff)
    t = grid.times()
    nu_t = transforms.inverse(w, nu, t, grid.d_omega).real
    mu_t = transforms.inverse(w, mu, t, grid.d_omega).real
    return KernelPair(
        "minus", w, nu, mu, t, nu_t, mu_t,
        fdr_residual=_fdr_residual(w, nu, mu, params),
        meta={
            "band": (params.ir_cutoff, grid.cutoff),
            # printed continuum prefactor lam^2 c^3 / 2 over the mode-sum one c lam^2 / 2
            "printed_over_derived": params.c**2,
            "derived_prefactor": minus_amplitude(params),
        },
    )


def mode_sum_kernel(t, bath: str, params: PhysicalParams, n_modes: int, band=(0.0, math.inf)):
    """Direct discrete sum over field modes: returns nu(t) + i mu(t).

    Only modes with band[0] <= omega_n <= band[1] are kept; n = 0 is excluded
    (it does not couple to the (+) sector and is singular in the (-) sector).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = np.arange(1, n_modes + 1)
    wn = 2.0 * math.pi * params.c * n / params.L
    wn = wn[(wn >= band[0]) & (wn <= band[1])]
    if bath == "plus":
        weight = wn / (2.0 * params.c**2)
    elif bath == "minus":
        weight = derive_scales(params).scaled_coupling_sq / (2.0 * wn)
    else:
        raise ValueError(f"unknown bath {bath!r}")
    z = thermal_factor(wn, params)
    phase = np.outer(t, wn)
    nu = np.cos(phase) @ (weight * z)
    mu = -np.sin(phase) @ weight
    return nu + 1j * mu


def cell_matched_band(params: PhysicalParams, band: tuple[float, float]) -> tuple[float, float]:
    """Continuum band covering exactly the cells of the modes kept by ``band``.

    Each discrete mode stands for a frequency cell of width 2 pi c / L centred
    on it; comparing against a continuum cut at the raw band edges leaves an
    O(cell / band) endpoint error that dominates near the (-) infrared edge.
    """
    d = 2.0 * math.pi * params.c / params.L
    lo = max(math.ceil(band[0] / d - 1e-12), 1) * d
    hi = math.floor(band[1] / d + 1e-12) * d
    return lo - 0.5 * d, hi + 0.5 * d


def continuum_kernel(t: float, bath: str, params: PhysicalParams, band: tuple[float, float]) -> complex:
    """Continuum limit of :func:`mode_sum_kernel` by adaptive quadrature over the band."""
    dos = derive_scales(params).density_of_states
    lo, hi = band
    if bath == "plus":
        def wgt(w):
            return w / (2.0 * params.c**2)
    elif bath == "minus":
        lb2 = derive_scales(params).scaled_coupling_sq

        def wgt(w):
            return lb2 / (2.0 * w)
    else:
        raise ValueError(f"unknown bath {bath!r}")

    def z(w):
        return float(thermal_factor(np.array([w]), params)[0])

    opts = dict(limit=2000, epsabs=0.0, epsrel=1e-11)
    nu = quad(lambda w: wgt(w) * z(w) * math.cos(w * t), lo, hi, **opts)[0]
    mu = -quad(lambda w: wgt(w) * math.sin(w * t), lo, hi, **opts)[0]
    return dos * (nu + 1j * mu)
