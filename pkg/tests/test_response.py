import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcemirror import response
from dcemirror.params import GridSpec, PhysicalParams


def test_impulse_response_matches_frozen_ode(default_run, frozen):
    ref = frozen["memory_ode"]
    s = default_run.susc
    ir = response.impulse_response(s, 20.0, 8001)
    G = np.interp(ref["t"], ir.t, ir.G)
    assert np.allclose(G, ref["G"], atol=5e-3)


def test_causality_and_passivity(default_run):
    s = default_run.susc
    assert s.causality_defect < 1e-6
    assert s.meta["passivity_min"] >= -1e-12
    assert s.meta["stable"]


@settings(max_examples=30, deadline=None)
@given(w=st.floats(0.01, 7.9))
def test_green_conjugate_symmetry(w):
    p = PhysicalParams()
    g = response.green_symbol(np.array([w, -w]) + 1e-9j, p, 8.0)
    assert abs(g[1] - np.conj(g[0])) <= 1e-6 * abs(g[0])


def test_decoupled_limit_is_free_oscillator():
    p = PhysicalParams(lam=0.0)
    s = response.susceptibility(GridSpec(), p, with_impulse=False)
    ir = response.impulse_response(s, 20.0)
    pos = ir.t >= 0
    assert np.sqrt(np.mean((ir.G[pos] - np.sin(ir.t[pos]) / p.omega0) ** 2)) < 1e-4


def test_static_instability_is_flagged():
    # strong coupling with a low infrared edge drives the static stiffness negative
    p = PhysicalParams(lam=1.5, ir_cutoff=0.01)
    s = response.susceptibility(GridSpec(), p, with_impulse=False)
    assert not s.meta["stable"]


def test_driven_correlator_fdr(warm_run):
    from dcemirror.baths import thermal_factor

    C = response.driven_correlator_spectrum(warm_run.susc, warm_run.minus)
    # symmetric part / antisymmetric part = z(w)
    w = C.omega
    inside = (np.abs(w) > 0.2) & (np.abs(w) < 7.5)
    sym = (C.values + C.values[::-1]).real
    anti = (C.values - C.values[::-1]).real
    z = thermal_factor(w, warm_run.params)
    assert np.max(np.abs(sym[inside] - z[inside] * anti[inside])) <= 1e-10 * np.max(np.abs(sym))
