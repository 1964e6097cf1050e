"""Invariant checks over the full pipeline, collected into one report."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import optics, pipeline
from .coefficients import dsgs_residual
from .mirror import product_oracle
from .params import GridSpec, PhysicalParams
from .wigner import CatStateSpec, GridUnderResolved, cat_state, evolve, gaussian_state


@dataclass(frozen=True)
class Entry:
    name: str
    value: float
    tolerance: float
    passed: bool
    kind: str  # "identity", "convergence" or "physics"


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / abs(b) if b != 0 else float("inf")


def _le(name, value, tol, kind) -> Entry:
    value = float(value)
    return Entry(name, value, tol, bool(np.isfinite(value) and value <= tol), kind)


def verify_suite(params: PhysicalParams, grid: GridSpec) -> list[Entry]:
    out: list[Entry] = []
    p = params

    T, R = optics.scattering(grid.omegas(), p)
    out.append(_le("optics unitarity max| |T|^2+|R|^2-1 |", np.max(np.abs(abs(T) ** 2 + abs(R) ** 2 - 1)), 1e-12, "identity"))

    pl = pipeline.run(p, grid)
    for kp in (pl.plus, pl.minus):
        scale = max(float(np.max(np.abs(kp.nu_tilde))), 1e-300)
        out.append(_le(f"{kp.label} bath FDR residual (relative)", kp.fdr_residual / scale, 1e-14, "identity"))

    s = pl.susc
    out.append(_le("idf causality defect", s.causality_defect, 1e-6, "convergence"))
    out.append(Entry("idf static stiffness w0^2 + shift > 0", p.omega0**2 + s.meta["static_shift"], 0.0, bool(s.meta["stable"]), "physics"))
    out.append(_le("idf passivity -min(w Im G)", max(-s.meta["passivity_min"], 0.0), 1e-12, "physics"))

    m = pl.mirror
    out.append(_le("mirror FDR residual (relative)", m.fdr_residual, 1e-3, "identity"))
    out.append(_le("mirror spectra shift under n_omega/2", m.meta["convergence_shift"], 1e-2, "convergence"))
    tk = pl.time_kernels
    out.append(_le("mirror kernel parity residual", max(tk.nu_parity, tk.mu_parity), 1e-8, "identity"))
    orc = product_oracle(pl.pairs, grid.times()[:: max(1, grid.n_t // 400)])
    out.append(_le("mirror time-product oracle RMS", orc["nu_rms"], 1e-2, "convergence"))

    lim = pl.limits
    out.append(_le("D_PP^s = M W z Gamma^s residual", dsgs_residual(lim.gamma, lim.d_pp, p), 1e-3, "identity"))
    span = grid.t_max
    if span * p.Omega >= 50.0:
        out.append(_le("route consistency Gamma(t) plateau", _rel(pl.trace.gamma[-1], lim.gamma), 2e-2, "convergence"))
        out.append(_le("route consistency D_PP(t) plateau", _rel(pl.trace.d_pp[-1], lim.d_pp), 2e-2, "convergence"))
    else:
        out.append(Entry("route consistency: t_max >= 50/Omega", span * p.Omega, 50.0, False, "convergence"))

    wc = pl.wigner_coefficients()
    out.append(Entry("Wigner diffusion heats (d_pp >= 0)", wc.d_pp, 0.0, wc.d_pp >= 0, "physics"))
    out.append(Entry("Wigner drift damps (gamma >= 0)", wc.gamma, 0.0, wc.gamma >= 0, "physics"))

    # short Wigner run: norm conservation with the stationary coefficients
    try:
        state = cat_state(CatStateSpec(x0=4.0, delta=1.0), grid, p.hbar)
    except GridUnderResolved:
        state = gaussian_state(grid, hbar=p.hbar)
    res = evolve(state, wc, 0.05, p.M, every=10**9, boundary_tol=None)
    out.append(_le("Wigner norm drift", abs(res.final.integral() - state.integral()), 1e-5, "identity"))
    return out


def report(entries: list[Entry]) -> dict:
    return {
        "passed": all(e.passed for e in entries),
        "entries": [asdict(e) for e in entries],
    }


def format_table(entries: list[Entry]) -> str:
    width = max(len(e.name) for e in entries)
    lines = []
    for e in entries:
        flag = "PASS" if e.passed else "FAIL"
        lines.append(f"{flag}  {e.name:<{width}}  value={e.value:.3e}  tol={e.tolerance:.1e}  [{e.kind}]")
    return "\n".join(lines)
