"""Stationary noise and dissipation of the mirror from the pair-creation convolution.

With omega_+ = w - w' (the (+) sector) and omega_- = w' (the (-) sector),

    nu_M~(w) = int dw'/2pi n(w, w'),    mu_M~(w) = i int dw'/2pi m(w, w'),
    n = K [nu+~(w_+) nu-~(w') - mu+~(w_+) mu-~(w')] G~(w') G~(-w'),
    m = K [mu+~(w_+) nu-~(w') + nu+~(w_+) mu-~(w')] G~(w') G~(-w') / i,

with K = 2 c^2 lam^2 / m^2 and the (+) spectra taken per unit length, so that
the result does not depend on the quantization length.  Substituting the bath
FDRs gives n = -K (1 + z_+ z_-) mu+~ mu-~ |G|^2 and m = K (z_+ + z_-) mu+~ mu-~ |G|^2,
hence n = -z(w) m by the coth addition formula.

On the half-offset grid w_i - w'_j = (i - j) d_omega lands on the integer grid,
so the (+) band edge falls on a cell boundary and gets half weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transforms
from .baths import (
    KernelPair,
    minus_bath_spectra,
    plus_bath_spectra,
    plus_dissipation,
    plus_noise,
    thermal_factor,
)
from .params import GridSpec, PhysicalParams
from .response import Susceptibility, susceptibility


class NotConverged(RuntimeError):
    pass


def pair_prefactor(params: PhysicalParams) -> float:
    return 2.0 * params.c**2 * params.lam**2 / params.m**2


def coverage(w: float, wp: np.ndarray, d_omega: float, cutoff: float) -> np.ndarray:
    """Fraction of each w' cell with |w - w'| <= cutoff.

    The (+) spectra are finite at their band edge, so the edge cell is weighted
    by the covered fraction instead of all-or-nothing.
    """
    a = np.maximum(wp - 0.5 * d_omega, w - cutoff)
    b = np.minimum(wp + 0.5 * d_omega, w + cutoff)
    return np.clip(b - a, 0.0, None) / d_omega


# Near the infrared edge Re chi diverges like log|w' - w_ir|, so G~ vanishes at
# the edge but passes through a narrow peak a few 1e-4 inside it, far below any
# practical grid spacing.  Cells within EDGE_CELLS of the edge are integrated on
# a geometrically graded Gauss-Legendre mesh instead.
EDGE_CELLS = 4
_EDGE_LEVELS = 12
_GAUSS = np.polynomial.legendre.leggauss(10)


def _edge_mesh(lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [lo, hi], graded towards lo."""
    cuts = lo + (hi - lo) * np.concatenate([[0.0], 10.0 ** -np.arange(_EDGE_LEVELS - 1, -1, -1.0)])
    x, g = _GAUSS
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * g)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class EdgeZone:
    cells: np.ndarray  # grid index of the cell holding each node
    x: np.ndarray
    weight: np.ndarray  # d_omega' weights
    minus_nu: np.ndarray
    minus_mu: np.ndarray
    gg: np.ndarray


def _edge_zone(w: np.ndarray, d_omega: float, params: PhysicalParams, cutoff: float) -> tuple[EdgeZone, np.ndarray]:
    from .baths import minus_dissipation, minus_noise
    from .response import green_symbol

    ir = params.ir_cutoff
    # zone = [ir, first cell boundary at least EDGE_CELLS cells above ir]
    top = (np.ceil(ir / d_omega) + EDGE_CELLS) * d_omega
    x, wt = _edge_mesh(ir, top)
    x = np.concatenate([x, -x])
    wt = np.concatenate([wt, wt])
    cells = np.floor(x / d_omega).astype(int) + w.size // 2
    in_zone = (np.abs(w) + 0.5 * d_omega > ir) & (np.abs(w) - 0.5 * d_omega < top)
    G = green_symbol(x, params, cutoff)
    Gm = green_symbol(-x, params, cutoff)
    zone = EdgeZone(cells, x, wt, minus_noise(x, params, cutoff).astype(complex),
                    minus_dissipation(x, params, cutoff), G * Gm)
    return zone, in_zone


@dataclass(frozen=True)
class PairDensity:
    """Cell-integrated n(w, w') and m(w, w') over grid x grid.

    Entry (i, j) is the integral of the integrand over the w'_j cell divided by
    d_omega, so that row sums times d_omega/2pi are the spectra.  Away from the
    infrared edge this is the node value times :func:`coverage`; edge cells
    come from the graded mesh in ``edge``.  ``n`` and ``m`` materialize the
    full float64 tables (8 N^2 bytes each); quadratures stream through rows.
    """

    omega: np.ndarray
    params: PhysicalParams
    cutoff: float
    minus_nu: np.ndarray  # nu-~(w') on the grid, zero outside the band and in the edge cells
    minus_mu: np.ndarray  # mu-~(w'), imaginary
    gg: np.ndarray  # G~(w') G~(-w'), real up to rounding
    edge: EdgeZone
    meta: dict = field(default_factory=dict)

    @property
    def d_omega(self) -> float:
        return float(self.omega[1] - self.omega[0])

    @property
    def size(self) -> int:
        return self.omega.size

    def rows(self, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        n = np.empty((stop - start, self.size))
        m = np.empty_like(n)
        for r, i in enumerate(range(start, stop)):
            n[r], m[r] = self.at(float(self.omega[i]))
        return n, m

    def _integrand(self, w, wp, mnu, mmu, gg):
        p = self.params
        wplus = w - wp
        pnu = plus_noise(wplus, p)
        pmu = plus_dissipation(wplus, p)
        K = pair_prefactor(p) * gg
        n = (K * (pnu * mnu - pmu * mmu)).real
        m = (K * (pmu * mnu + pnu * mmu) / 1j).real
        return n, m

    def at(self, w: float) -> tuple[np.ndarray, np.ndarray]:
        """One row of cell-integrated (n, m) at an arbitrary outer frequency ``w``."""
        cov = coverage(w, self.omega, self.d_omega, self.cutoff)
        n, m = self._integrand(w, self.omega, self.minus_nu, self.minus_mu, self.gg)
        n *= cov
        m *= cov
        e = self.edge
        inside = np.abs(w - e.x) <= self.cutoff
        en, em = self._integrand(w, e.x, e.minus_nu, e.minus_mu, e.gg)
        scale = np.where(inside, e.weight, 0.0) / self.d_omega
        np.add.at(n, e.cells, en * scale)
        np.add.at(m, e.cells, em * scale)
        return n, m

    @property
    def n(self) -> np.ndarray:
        return self.rows(0, self.size)[0]

    @property
    def m(self) -> np.ndarray:
        return self.rows(0, self.size)[1]


def pair_density(
    grid: GridSpec,
    plus_kernels: KernelPair,
    minus_kernels: KernelPair,
    susc: Susceptibility,
) -> PairDensity:
    w = grid.omegas()
    for obj, name in ((plus_kernels, "plus"), (minus_kernels, "minus"), (susc, "susceptibility")):
        if not np.array_equal(obj.omega, w):
            raise ValueError(f"{name} table is not on the grid")
    p = susc.params
    edge, in_zone = _edge_zone(w, grid.d_omega, p, grid.cutoff)
    minus_nu = np.where(in_zone, 0.0, minus_kernels.nu_tilde)
    minus_mu = np.where(in_zone, 0.0, minus_kernels.mu_tilde)
    gg = susc.G * susc.G[::-1]
    meta = {
        "prefactor": pair_prefactor(p),
        # the same prefactor written with the scaled coupling: lam-bar^2 L / m^2
        "prefactor_scaled": 2.0 * p.c**2 * p.lam**2 / p.L * p.L / p.m**2,
        "gg_imag_residue": float(np.max(np.abs(gg.imag)) / max(np.max(np.abs(gg)), 1e-300)),
        "edge_cells": int(np.count_nonzero(in_zone)),
    }
    return PairDensity(w, p, grid.cutoff, minus_nu, minus_mu, gg, edge, meta)


def quadrature(pd: PairDensity) -> tuple[np.ndarray, np.ndarray]:
    """(int dw'/2pi n, int dw'/2pi m) at every grid frequency."""
    N = pd.size
    nu = np.empty(N)
    mm = np.empty(N)
    for i in range(N):
        nu[i], mu = spectrum_at(pd, float(pd.omega[i]))
        mm[i] = mu.imag
    return nu, mm


def spectrum_at(pd: PairDensity, w: float) -> tuple[float, complex]:
    """(nu_M~(w), mu_M~(w)) at any frequency by a single-row quadrature."""
    n, m = pd.at(w)
    scale = pd.d_omega / (2.0 * np.pi)
    return float(scale * n.sum()), 1j * float(scale * m.sum())


def build_pair_density(grid: GridSpec, params: PhysicalParams) -> PairDensity:
    minus = minus_bath_spectra(grid, params)
    plus = plus_bath_spectra(grid, params)
    susc = susceptibility(grid, params, minus, with_impulse=False)
    return pair_density(grid, plus, minus, susc)


def _relative(a: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.abs(ref)))
    return float(np.max(np.abs(a))) / scale if scale > 0 else 0.0


TAPER_FRACTION = 0.25


def mirror_spectra(
    pd: PairDensity,
    grid: GridSpec,
    *,
    check_convergence: bool = True,
    strict: bool = False,
    taper_fraction: float = TAPER_FRACTION,
) -> KernelPair:
    """Tabulate nu_M~ and mu_M~ on the grid and inverse-transform to time.

    The time kernels are transforms of the spectra rolled off over the top
    ``taper_fraction`` of the band (see :func:`transforms.edge_taper`); the
    tabulated spectra themselves are not modified.

    The convergence check rebuilds the pipeline with n_omega / 2 and compares the
    two quadratures at every grid frequency; a shift above 1% of the spectral
    peak sets ``meta['converged'] = False`` (or raises when ``strict``).
    """
    p = pd.params
    w = pd.omega
    nu_r, m_r = quadrature(pd)
    nu = nu_r.astype(complex)
    mu = 1j * m_r
    z = thermal_factor(w, p)
    resid = np.abs(nu - 1j * z * mu)
    fdr = _relative(resid, nu)

    meta = dict(pd.meta)
    taper_width = taper_fraction * grid.cutoff
    if p.Omega >= grid.cutoff - taper_width:
        raise ValueError("Omega lies inside the band-edge taper; raise the cutoff")
    meta.update(
        taper_width=taper_width,
        n_omega=w.size,
        cutoff=grid.cutoff,
        fdr_profile=resid,
        mu_real_residue=_relative(mu.real, mu),
        mu_odd_residue=_relative(mu + mu[::-1], mu),
        nu_even_residue=_relative(nu - nu[::-1], nu),
    )
    if check_convergence:
        coarse = build_pair_density(grid.replace(n_omega=grid.n_omega // 2), p)
        shift = np.array([spectrum_at(coarse, x)[0] for x in w]) - nu_r
        mshift = np.array([spectrum_at(coarse, x)[1].imag for x in w]) - m_r
        conv = max(_relative(shift, nu_r), _relative(mshift, m_r))
        meta["convergence_shift"] = conv
        meta["converged"] = bool(conv <= 0.01)
        if strict and not meta["converged"]:
            raise NotConverged(f"halving n_omega shifts the mirror spectra by {conv:.3g} of peak")

    t = grid.times()
    win = transforms.edge_taper(w, grid.cutoff, taper_width)
    nu_t = transforms.inverse(w, win * nu, t, grid.d_omega).real
    mu_t = transforms.inverse(w, win * mu, t, grid.d_omega).real
    return KernelPair("mirror", w, nu, mu, t, nu_t, mu_t, fdr_residual=fdr, meta=meta)


@dataclass(frozen=True)
class MirrorTimeKernels:
    t: np.ndarray
    nu: np.ndarray
    mu: np.ndarray
    nu_parity: float  # max |nu(t) - nu(-t)| / max |nu|
    mu_parity: float  # max |mu(t) + mu(-t)| / max |mu|
    imag_residue: float


def mirror_time_kernels(spectra: KernelPair, t=None) -> MirrorTimeKernels:
    """Band-limited inverse transform of the (tapered) spectra at +t and -t."""
    w = spectra.omega
    d = float(w[1] - w[0])
    t = spectra.t if t is None else np.asarray(t, dtype=float)
    win = transforms.edge_taper(w, spectra.meta["cutoff"], spectra.meta.get("taper_width", 0.0))
    nu_p = transforms.inverse(w, win * spectra.nu_tilde, t, d)
    nu_m = transforms.inverse(w, win * spectra.nu_tilde, -t, d)
    mu_p = transforms.inverse(w, win * spectra.mu_tilde, t, d)
    mu_m = transforms.inverse(w, win * spectra.mu_tilde, -t, d)
    imag = max(_relative(nu_p.imag, nu_p), _relative(mu_p.imag, mu_p))
    return MirrorTimeKernels(
        t,
        nu_p.real,
        mu_p.real,
        _relative(nu_p.real - nu_m.real, nu_p.real),
        _relative(mu_p.real + mu_m.real, mu_p.real),
        imag,
    )


def product_oracle(pd: PairDensity, t) -> dict:
    """Cross-check the frequency convolution against a product in time.

    nu_M(t) = (2 c^2 lam^2 / hbar) [nu+(t) Re C(t) - mu+(t) Im C(t)], with C the
    driven idf correlator and nu+, mu+ per unit length, each factor built by
    its own inverse sum over the w' nodes.  The convolution table is extended
    to |w| <= 2 cutoff, where the product spectrum ends, before transforming.
    Returns RMS deviations relative to the RMS of the tabulated route.
    """
    p = pd.params
    d = pd.d_omega
    N = pd.size
    t = np.asarray(t, dtype=float)
    two_pi = 2.0 * np.pi

    # (+) factors on the integer grid; the band edge sits on a node (half weight)
    k = np.arange(-(N // 2), N // 2 + 1) * d
    half = np.ones(k.size)
    half[[0, -1]] = 0.5
    plus_nu = transforms.inverse(k, half * plus_noise(k, p), t, d).real
    plus_mu = transforms.inverse(k, half * plus_dissipation(k, p), t, d).real

    # C(t) = (hbar/m^2) int dw'/2pi G(w')[nu- + i mu-](w')G(-w') e^{-iw't}, same nodes as the table
    e = pd.edge
    x = np.concatenate([pd.omega, e.x])
    wt = np.concatenate([np.full(N, d), e.weight])
    spec = np.concatenate([pd.gg * (pd.minus_nu + 1j * pd.minus_mu), e.gg * (e.minus_nu + 1j * e.minus_mu)])
    C = (p.hbar / p.m**2) * (np.exp(-1j * np.outer(t, x)) @ (wt * spec)) / two_pi
    K = 2.0 * p.c**2 * p.lam**2 / p.hbar
    nu_prod = K * (plus_nu * C.real - plus_mu * C.imag)
    mu_prod = K * (plus_mu * C.real + plus_nu * C.imag)

    wide = (np.arange(2 * N) - N + 0.5) * d
    vals = [spectrum_at(pd, float(v)) for v in wide]
    nu_tab = transforms.inverse(wide, np.array([v[0] for v in vals]), t, d).real
    mu_tab = transforms.inverse(wide, np.array([v[1] for v in vals]), t, d).real

    def rms(a, b):
        ref = np.sqrt(np.mean(b**2))
        diff = np.sqrt(np.mean((a - b) ** 2))
        return float(diff / ref) if ref > 0 else float(diff)

    return {"nu_rms": rms(nu_prod, nu_tab), "mu_rms": rms(mu_prod, mu_tab)}
