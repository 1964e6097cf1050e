"""End-to-end assembly: baths -> idf response -> mirror kernels -> coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baths import KernelPair, minus_bath_spectra, plus_bath_spectra
from .coefficients import (
    CoefficientTrace,
    SignConvention,
    StationaryLimits,
    WignerCoefficients,
    coefficient_traces,
    stationary_coefficients,
    stationary_limits,
)
from .mirror import MirrorTimeKernels, PairDensity, mirror_spectra, mirror_time_kernels, pair_density
from .params import GridSpec, PhysicalParams
from .response import Susceptibility, susceptibility


@dataclass(frozen=True)
class Pipeline:
    params: PhysicalParams
    grid: GridSpec
    plus: KernelPair
    minus: KernelPair
    susc: Susceptibility
    pairs: PairDensity
    mirror: KernelPair
    time_kernels: MirrorTimeKernels
    limits: StationaryLimits
    trace: CoefficientTrace
    signs: SignConvention

    def wigner_coefficients(self) -> WignerCoefficients:
        return self.signs.apply(stationary_coefficients(self.trace, self.limits), self.params)


def run(params: PhysicalParams, grid: GridSpec, *, check_convergence: bool = True, with_impulse: bool = True) -> Pipeline:
    plus = plus_bath_spectra(grid, params)
    minus = minus_bath_spectra(grid, params)
    susc = susceptibility(grid, params, minus, with_impulse=with_impulse)
    pairs = pair_density(grid, plus, minus, susc)
    mirror = mirror_spectra(pairs, grid, check_convergence=check_convergence)
    tk = mirror_time_kernels(mirror)
    limits = stationary_limits(pairs, params)
    trace = coefficient_traces(tk, params, stationary=limits)
    return Pipeline(params, grid, plus, minus, susc, pairs, mirror, tk, limits, trace, SignConvention.from_stationary(limits))


def decoherence_scan(pl: Pipeline, separations, *, delta: float = 1.0, horizon_factor: float = 4.0, samples: int = 40):
    """Evolve cat states with the stationary coefficients and fit t_XX for each x0.

    Each run lasts ``horizon_factor`` predicted decoherence times hbar/(|D_PP^s| x0^2)
    and records the momentum fringe at wavenumber x0/hbar about ``samples`` times.
    """
    from .baths import thermal_factor
    from .wigner import CatStateSpec, cat_state, decoherence_report, evolve, fringe_component, max_stable_dt

    p = pl.params
    wc = pl.wigner_coefficients()
    z = float(thermal_factor([p.Omega], p)[0])
    reports = []
    for x0 in separations:
        spec = CatStateSpec(float(x0), 0.0, delta)
        state = cat_state(spec, pl.grid, p.hbar)
        pred = p.hbar / (abs(pl.limits.d_pp) * spec.x0**2)
        times, vis = [], []

        def watch(s, k=spec.x0 / p.hbar):
            times.append(s.t)
            vis.append(abs(fringe_component(s, k)))

        steps = int(np.ceil(horizon_factor * pred / (0.8 * max_stable_dt(state, wc, p.M))))
        every = max(1, steps // samples)
        res = evolve(state, wc, horizon_factor * pred, p.M, every=every, observers=(watch,))
        neg = [r["negativity"] for r in res.records]
        reports.append(decoherence_report(times, vis, neg, d_pp_s=pl.limits.d_pp, gamma_s=pl.limits.gamma,
                                          spec=spec, M=p.M, Omega=p.Omega, z=z, hbar=p.hbar))
    return reports
