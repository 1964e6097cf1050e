"""Master-equation coefficients from the stationary mirror kernels.

With the lag tau = t - s and a sharp switch-on at t0,

    D_PP(t)   = -hbar int_0^{t-t0} cos(W tau) nu_M(tau) dtau
    D_XP(t)   = (hbar / M W) int_0^{t-t0} sin(W tau) nu_M(tau) dtau
    Gamma(t)  = (hbar / M W) int_0^{t-t0} sin(W tau) mu_M(tau) dtau
    dW2^2(t)  = -(2 hbar / M) int_0^{t-t0} cos(W tau) mu_M(tau) dtau

where W is the trap frequency.  The kernels already carry the coupling
(lam-bar^2 L = 2 c^2 lam^2), so no further factor of lam-bar^2 appears here.
As t - t0 grows, D_PP -> -(hbar/2) nu_M~(W) and Gamma -> -i hbar mu_M~(W) / (2 M W).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .baths import KernelPair, thermal_factor
from .mirror import MirrorTimeKernels, PairDensity, spectrum_at
from .params import PhysicalParams


class LagRangeExceeded(ValueError):
    pass


class OutOfBand(ValueError):
    pass


@dataclass(frozen=True)
class StationaryLimits:
    gamma: float
    d_pp: float
    nu_at: float  # nu_M~(W)
    mu_at: complex  # mu_M~(W)
    imag_residue: float  # |Im| / |Re| discarded when forming real coefficients
    method: str


@dataclass(frozen=True)
class CoefficientTrace:
    t: np.ndarray
    gamma: np.ndarray
    d_pp: np.ndarray
    d_xp: np.ndarray
    d_omega2_sq: np.ndarray
    delta_omega1_sq: float
    stationary: StationaryLimits | None = None
    meta: dict = field(default_factory=dict)

    @property
    def omega_ren_sq(self) -> np.ndarray:
        return self.meta["Omega"] ** 2 + self.delta_omega1_sq + self.d_omega2_sq

    def at(self, t: float) -> dict:
        """Coefficients at time ``t`` by linear interpolation."""
        if t < self.t[0] - 1e-12 or t > self.t[-1] + 1e-12:
            raise LagRangeExceeded(f"t = {t:g} outside the trace [{self.t[0]:g}, {self.t[-1]:g}]")
        return {
            name: float(np.interp(t, self.t, getattr(self, name)))
            for name in ("gamma", "d_pp", "d_xp", "d_omega2_sq")
        }

    def rows(self):
        ren = self.omega_ren_sq
        for i in range(self.t.size):
            yield (self.t[i], self.gamma[i], self.d_pp[i], self.d_xp[i], self.d_omega2_sq[i], ren[i])


CSV_HEADER = ("t", "gamma", "d_pp", "d_xp", "d_omega2_sq", "omega_ren_sq")


def coefficient_traces(
    kernels: MirrorTimeKernels,
    params: PhysicalParams,
    t0: float = 0.0,
    t_end: float | None = None,
    stationary: StationaryLimits | None = None,
) -> CoefficientTrace:
    """Time-dependent coefficients on the kernel lag grid, from t0 to t_end."""
    tau = kernels.t
    horizon = float(tau[-1])
    span = horizon if t_end is None else t_end - t0
    if span > horizon * (1 + 1e-12):
        raise LagRangeExceeded(f"t - t0 = {span:g} exceeds the kernel table horizon {horizon:g}")
    if span < 0:
        raise ValueError("t_end must not precede t0")
    keep = tau <= span * (1 + 1e-12)
    tau = tau[keep]
    nu = kernels.nu[keep]
    mu = kernels.mu[keep]
    p = params
    W = p.Omega
    c, s = np.cos(W * tau), np.sin(W * tau)

    def cum(f):
        return cumulative_trapezoid(f, tau, initial=0.0)

    d_pp = -p.hbar * cum(c * nu)
    d_xp = p.hbar / (p.M * W) * cum(s * nu)
    gamma = p.hbar / (p.M * W) * cum(s * mu)
    dw2 = -2.0 * p.hbar / p.M * cum(c * mu)
    meta = {"Omega": W, "t0": t0}
    return CoefficientTrace(t0 + tau, gamma, d_pp, d_xp, dw2, p.delta_omega1_sq, stationary, meta)


def stationary_limits(source: PairDensity | KernelPair, params: PhysicalParams) -> StationaryLimits:
    """(Gamma^s, D_PP^s) from the mirror spectra at the trap frequency.

    A :class:`PairDensity` is evaluated exactly at W by one quadrature row; a
    tabulated :class:`KernelPair` is interpolated with a local cubic spline.
    """
    W = params.Omega
    if isinstance(source, PairDensity):
        if not W < source.cutoff:
            raise OutOfBand(f"Omega = {W:g} is outside the band |w| < {source.cutoff:g}")
        nu_at, mu_at = spectrum_at(source, W)
        method = "direct"
    else:
        w = source.omega
        if not (w[0] < W < w[-1]):
            raise OutOfBand(f"Omega = {W:g} is outside the tabulated band")
        i = int(np.searchsorted(w, W))
        sl = slice(max(i - 3, 0), min(i + 3, w.size))
        nu_at = complex(CubicSpline(w[sl], source.nu_tilde[sl])(W))
        mu_at = complex(CubicSpline(w[sl], source.mu_tilde[sl])(W))
        method = "cubic"
    d_pp_c = -0.5 * params.hbar * nu_at
    gamma_c = -0.5j * params.hbar / (params.M * W) * mu_at
    scale = max(abs(d_pp_c.real), abs(gamma_c.real), 1e-300)
    residue = max(abs(complex(d_pp_c).imag), abs(complex(gamma_c).imag)) / scale
    return StationaryLimits(float(np.real(gamma_c)), float(np.real(d_pp_c)), float(np.real(nu_at)), complex(mu_at), residue, method)


def dsgs_residual(gamma: float, d_pp: float, params: PhysicalParams) -> float:
    """|D_PP - M W z(W) Gamma| / |D_PP|; zero when both vanish."""
    z = float(thermal_factor(np.array([params.Omega]), params)[0])
    diff = abs(d_pp - params.M * params.Omega * z * gamma)
    if d_pp == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return diff / abs(d_pp)


@dataclass(frozen=True)
class WignerCoefficients:
    """Coefficients as they enter the phase-space equation

        dW/dt = -(p/M) dW/dx + M W_ren^2 x dW/dp + d_pp W_pp + d_xp W_xp + 2 gamma d(pW)/dp.
    """

    d_pp: float
    d_xp: float
    gamma: float
    omega_ren_sq: float


@dataclass(frozen=True)
class SignConvention:
    """Signs mapping the raw coefficients onto heating diffusion and damping drift.

    d_pp_w = -hbar * diffusion * D_PP, d_xp_w = hbar * diffusion * D_XP,
    gamma_w = friction * Gamma and friction also multiplies dW2^2.
    """

    diffusion: int = 1
    friction: int = 1

    @classmethod
    def from_stationary(cls, limits: StationaryLimits) -> "SignConvention":
        # momentum diffusion must heat and the drift must damp
        return cls(diffusion=-1 if limits.d_pp > 0 else 1, friction=-1 if limits.gamma < 0 else 1)

    def describe(self) -> dict:
        return {
            "diffusion_sign": self.diffusion,
            "friction_sign": self.friction,
            "note": "diffusion term -hbar*D_PP as printed" if self.diffusion == 1 else "diffusion term flipped",
        }

    def apply(self, coeffs: dict, params: PhysicalParams) -> WignerCoefficients:
        h = params.hbar
        ren = params.Omega**2 + params.delta_omega1_sq + self.friction * coeffs["d_omega2_sq"]
        return WignerCoefficients(
            d_pp=-h * self.diffusion * coeffs["d_pp"],
            d_xp=h * self.diffusion * coeffs["d_xp"],
            gamma=self.friction * coeffs["gamma"],
            omega_ren_sq=ren,
        )


def stationary_coefficients(trace: CoefficientTrace, limits: StationaryLimits) -> dict:
    """Stationary coefficient set: spectral D_PP and Gamma, plateau D_XP and dW2^2."""
    return {
        "gamma": limits.gamma,
        "d_pp": limits.d_pp,
        "d_xp": float(trace.d_xp[-1]),
        "d_omega2_sq": float(trace.d_omega2_sq[-1]),
    }
