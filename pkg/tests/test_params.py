import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcemirror.params import (
    ConfigError,
    GridSpec,
    PhysicalParams,
    default_config_text,
    derive_scales,
    dump_config,
    load_config,
)

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(M=pos, Omega=st.floats(0.2, 4.0), lam=st.floats(0.0, 3.0), T=st.floats(0.0, 50.0))
def test_config_round_trip_is_bit_exact(M, Omega, lam, T):
    p = PhysicalParams(M=M, Omega=Omega, lam=lam, T=T)
    g = GridSpec()
    p2, g2 = load_config(dump_config(p, g))
    assert p2 == p and g2 == g


def test_defaults_load():
    p, g = load_config(default_config_text())
    assert p == PhysicalParams() and g == GridSpec()


@pytest.mark.parametrize(
    "text, field",
    [
        ("M = 1", "Omega"),
        (default_config_text() + "bogus = 1\n", "bogus"),
        (default_config_text().replace("T = 0.0", "T = -1"), "T"),
        (default_config_text().replace("n_omega = 2048", "n_omega = 2.5"), "n_omega"),
        (default_config_text().replace("L = 1000.0", "L = 1.0"), "L"),
    ],
)
def test_invalid_configs_name_the_field(text, field):
    with pytest.raises(ConfigError) as err:
        load_config(text)
    assert err.value.field == field


def test_require_grid():
    text = "\n".join(line for line in default_config_text().splitlines() if not line.startswith("n_t"))
    load_config(text)
    with pytest.raises(ConfigError):
        load_config(text, require_grid=True)


def test_grid_is_half_offset_and_symmetric():
    g = GridSpec(n_omega=64)
    w = g.omegas()
    assert w.size == 64
    assert math.isclose(w[32], 0.5 * g.d_omega)
    assert (w + w[::-1] == 0).all()


def test_plasma_frequency_and_scales():
    p = PhysicalParams()
    assert math.isclose(p.plasma_frequency, p.c * p.lam**2 / (2 * p.m * p.omega0**2))
    s = derive_scales(p)
    assert math.isclose(s.density_of_states, p.L / (2 * math.pi * p.c))
