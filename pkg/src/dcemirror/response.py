"""Internal oscillator dressed by the (-) bath: susceptibility, impulse response, correlators.

The memory term of the idf equation of motion,
    q'' + w0^2 q + (2/m) int_{-inf}^t mu-(t-s) q(s) ds = f-(t)/m,
has the retarded symbol (2/m) chi(w) with chi(w) = int_0^inf dt e^{iwt} mu-(t).
For the band-limited mu-~ = -iA/w on w_ir <= |w| <= cutoff this is closed form:

    chi(w) = A / (2 pi w) [log(w + cutoff) - log(w + w_ir) + log(w - w_ir) - log(w - cutoff)],

analytic in the upper half plane.  On the real axis Im chi = -A / (2w) inside the
band, i.e. half of mu-~, which reproduces the static scattering amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import sici

from . import transforms
from .baths import KernelPair, minus_amplitude, thermal_factor
from .params import GridSpec, PhysicalParams


class ResonanceOnGrid(RuntimeError):
    pass


def memory_symbol(w, params: PhysicalParams, cutoff: float):
    """chi(w) for complex w with Im w >= 0 (boundary value from above on the real axis)."""
    w = np.asarray(w, dtype=complex)
    # force the +i0 side for exactly real input
    w = np.where(w.imag == 0, w.real + 1j * 0.0, w)
    lo = params.ir_cutoff
    A = minus_amplitude(params)
    logs = np.log(w + cutoff) - np.log(w + lo) + np.log(w - lo) - np.log(w - cutoff)
    return A / (2.0 * np.pi * w) * logs


def memory_kernel(t, params: PhysicalParams, cutoff: float):
    """Band-limited mu-(t) = -(A/pi) [Si(cutoff t) - Si(w_ir t)]."""
    t = np.asarray(t, dtype=float)
    si_hi = sici(cutoff * t)[0]
    si_lo = sici(params.ir_cutoff * t)[0]
    return -(minus_amplitude(params) / np.pi) * (si_hi - si_lo)


def green_symbol(w, params: PhysicalParams, cutoff: float):
    w = np.asarray(w, dtype=complex)
    return 1.0 / (params.omega0**2 - w**2 + (2.0 / params.m) * memory_symbol(w, params, cutoff))


@dataclass(frozen=True)
class Susceptibility:
    omega: np.ndarray
    G: np.ndarray  # retarded G~_q on the real grid
    params: PhysicalParams
    cutoff: float
    eta: float
    causality_defect: float = float("nan")
    meta: dict = field(default_factory=dict)

    def at(self, w):
        """Analytic G~_q at arbitrary (upper half plane or real) frequencies."""
        return green_symbol(w, self.params, self.cutoff)

    @property
    def d_omega(self) -> float:
        return float(self.omega[1] - self.omega[0])


@dataclass(frozen=True)
class ImpulseResponse:
    t: np.ndarray
    G: np.ndarray
    causality_defect: float


def susceptibility(
    grid: GridSpec,
    params: PhysicalParams,
    minus_kernels: KernelPair | None = None,
    *,
    eta: float | None = None,
    with_impulse: bool = True,
) -> Susceptibility:
    """Tabulate G~_q(w) = 1 / (w0^2 - w^2 + (2/m) chi(w + i0)).

    The real-axis limit is taken by evaluating at w + i eta and w + i eta/2 and
    Richardson-extrapolating to eta -> 0.
    """
    w = grid.omegas()
    if minus_kernels is not None and not np.array_equal(minus_kernels.omega, w):
        raise ValueError("minus_kernels must be tabulated on the same grid")
    if eta is None:
        # the band edges are log branch points of chi; keep eta far below the
        # distance from the nearest node to an edge
        edges = np.array([params.ir_cutoff, grid.cutoff])
        gap = float(np.min(np.abs(np.abs(w)[:, None] - edges[None, :])))
        eta = min(grid.cutoff / 1e4, 1e-3 * gap)
    g1 = green_symbol(w + 1j * eta, params, grid.cutoff)
    g2 = green_symbol(w + 0.5j * eta, params, grid.cutoff)
    G = 2.0 * g2 - g1
    denom_min = float(np.min(np.abs(1.0 / G)))
    if denom_min < 1e-12 * params.omega0**2:
        raise ResonanceOnGrid(
            f"|denominator| = {denom_min:.3g} on the grid; shift the grid offset or change n_omega"
        )
    susc = Susceptibility(w, G, params, grid.cutoff, eta)
    shift = float((2.0 / params.m) * memory_symbol(1e-9j, params, grid.cutoff).real)
    meta = {
        # mu-(t) = -(lam-bar^2/2) sum g_n carries a minus sign; with it the
        # resonant poles sit below the real axis (passive, decaying response)
        "memory_sign": -1,
        "static_shift": shift,
        "passivity_min": float(np.min(w * G.imag)),
        # the dressed static stiffness must stay positive, else a growing mode exists
        "stable": bool(params.omega0**2 + shift > 0),
    }
    if with_impulse:
        ir = impulse_response(susc, grid.t_max)
        return Susceptibility(w, G, params, grid.cutoff, eta, ir.causality_defect, meta)
    return Susceptibility(w, G, params, grid.cutoff, eta, meta=meta)


def contour_height(d_omega: float) -> float:
    # aliasing images sit 2 pi / d_omega away; damp them by e^-30
    return 30.0 * d_omega / (2.0 * np.pi)


def impulse_response(susc: Susceptibility, t_max: float, n_t: int = 4001) -> ImpulseResponse:
    """G_q(t) on [-t_max, t_max] by band-limited inverse transform.

    The undamped oscillator part theta(t) sin(w0 t)/w0 is added analytically;
    the remainder G~ - 1/(w0^2 - w^2), which falls off as w^-5, is transformed
    along the line Im w = h above every singularity and multiplied back by e^{h t}.
    Values at t < 0 are returned as computed.
    """
    p = susc.params
    w0 = p.omega0
    t = np.linspace(-t_max, t_max, 2 * (n_t // 2) + 1)
    h = contour_height(susc.d_omega)
    wc = susc.omega + 1j * h
    rest = susc.at(wc) - 1.0 / (w0**2 - wc**2)
    # e^{-i(w + ih)t} = e^{-iwt} e^{ht}
    G = (transforms.inverse(susc.omega, rest, t, susc.d_omega) * np.exp(h * t)).real
    G = G + np.where(t > 0, np.sin(w0 * t) / w0, 0.0)
    pos = t > 0
    defect = float(np.max(np.abs(G[t < 0])) / np.max(np.abs(G[pos])))
    return ImpulseResponse(t, G, defect)


def integrate_memory_equation(params: PhysicalParams, cutoff: float, t_max: float, dt: float = 2.5e-3):
    """Impulse response of the idf equation by direct time stepping (oracle).

    Solves G'' = -w0^2 G - (2/m) int_0^t mu-(t-s) G(s) ds with G(0) = 0, G'(0) = 1
    using the Stormer recursion and trapezoidal memory sums.
    """
    n = int(round(t_max / dt)) + 1
    t = np.arange(n) * dt
    kern = memory_kernel(t, params, cutoff)  # kern[0] = 0
    w0sq = params.omega0**2
    c = 2.0 / params.m
    G = np.zeros(n)
    G[1] = dt - w0sq * dt**3 / 6.0
    for k in range(1, n - 1):
        # trapezoid over s in [0, t_k]; endpoints kern[0] = 0 and G[0] = 0
        mem = dt * (kern[k:0:-1] @ G[1 : k + 1]) - 0.5 * dt * kern[0] * G[k]
        acc = -w0sq * G[k] - c * mem
        G[k + 1] = 2.0 * G[k] - G[k - 1] + dt * dt * acc
    return t, G


def free_idf_correlator(dt, params: PhysicalParams):
    """<q_h(t) q_h(s)> of the undamped thermal idf, dt = t - s."""
    dt = np.asarray(dt, dtype=float)
    p = params
    z0 = float(thermal_factor(np.array([p.omega0]), p)[0])
    return p.hbar / (2.0 * p.m * p.omega0) * (z0 * np.cos(p.omega0 * dt) - 1j * np.sin(p.omega0 * dt))


@dataclass(frozen=True)
class SpectralTable:
    omega: np.ndarray
    values: np.ndarray
    label: str


def driven_correlator_spectrum(susc: Susceptibility, minus_kernels: KernelPair) -> SpectralTable:
    """Stationary <q(t) q(0)> spectrum: (hbar/m^2) G~(w) [nu-~ + i mu-~](w) G~(-w)."""
    p = susc.params
    G = susc.G
    # G~(-w) = G~(w)* on the real axis; the grid is symmetric so reverse is exact
    vals = (p.hbar / p.m**2) * G * (minus_kernels.nu_tilde + 1j * minus_kernels.mu_tilde) * G[::-1]
    return SpectralTable(susc.omega, vals, "driven_idf_correlator")


def driven_correlator_time(table: SpectralTable, t) -> np.ndarray:
    d = float(table.omega[1] - table.omega[0])
    return transforms.inverse(table.omega, table.values, t, d)
