"""Physical constants, derived scales and grid specifications.

Configuration files are flat ``key = value`` documents (``#`` comments allowed).
Natural units (hbar = c = k_B = 1, frequencies in units of omega0) are the
default; every constant can be overridden for dimensional runs.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, fields

import numpy as np


class ConfigError(ValueError):
    """Raised for a missing, unknown or invalid configuration value."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class PhysicalParams:
    M: float = 10.0  # mirror mass
    Omega: float = 0.5  # trap frequency
    m: float = 1.0  # idf mass
    omega0: float = 1.0  # idf frequency
    lam: float = math.sqrt(0.1)  # idf-field coupling
    c: float = 1.0
    L: float = 1000.0  # quantization length
    T: float = 0.0  # temperature (energy / k_B)
    hbar: float = 1.0
    kB: float = 1.0
    # lower edge of the (-) bath band; keeps the idf equation stable (see README)
    ir_cutoff: float = 0.1
    # Delta Omega_1^2: equilibrium correlator is not evaluated, taken as input
    delta_omega1_sq: float = 0.0

    def __post_init__(self):
        for name in ("M", "Omega", "m", "omega0", "c", "L", "hbar", "kB", "ir_cutoff"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.lam >= 0:
            raise ConfigError("lam", f"coupling must be positive, got {self.lam!r}")
        if not self.T >= 0:
            raise ConfigError("T", f"temperature must be >= 0, got {self.T!r}")

    @property
    def plasma_frequency(self) -> float:
        return self.c * self.lam**2 / (2.0 * self.m * self.omega0**2)

    def replace(self, **changes) -> "PhysicalParams":
        d = asdict(self)
        d.update(changes)
        return PhysicalParams(**d)


@dataclass(frozen=True)
class GridSpec:
    cutoff: float = 8.0  # band limit Lambda
    n_omega: int = 2048
    t_max: float = 100.0
    n_t: int = 4001
    x_min: float = -16.0
    x_max: float = 16.0
    p_min: float = -8.0
    p_max: float = 8.0
    n_x: int = 256
    n_p: int = 256

    # hard stability bound on cutoff * dt (band-limited sampling, dt < pi / cutoff)
    NYQUIST_BOUND = math.pi

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ConfigError("cutoff", "cutoff must be positive")
        if self.n_omega < 2 or self.n_omega % 2:
            raise ConfigError("n_omega", f"n_omega must be even and >= 2, got {self.n_omega}")
        if not self.t_max > 0:
            raise ConfigError("t_max", "t_max must be positive")
        if self.n_t < 2:
            raise ConfigError("n_t", "n_t must be >= 2")
        if self.cutoff * self.t_max / (self.n_t - 1) >= self.NYQUIST_BOUND:
            raise ConfigError(
                "n_t",
                f"cutoff*t_max/(n_t-1) = {self.cutoff * self.t_max / (self.n_t - 1):.4g} "
                f"exceeds the sampling bound {self.NYQUIST_BOUND:.4g}",
            )
        if not self.x_max > self.x_min:
            raise ConfigError("x_max", "x_max must exceed x_min")
        if not self.p_max > self.p_min:
            raise ConfigError("p_max", "p_max must exceed p_min")
        for name in ("n_x", "n_p"):
            if getattr(self, name) < 8:
                raise ConfigError(name, f"{name} must be >= 8")

    @property
    def d_omega(self) -> float:
        return 2.0 * self.cutoff / self.n_omega

    def omegas(self) -> np.ndarray:
        """Symmetric half-offset frequency grid; omega = 0 is never a node."""
        j = np.arange(self.n_omega) - self.n_omega // 2
        return (j + 0.5) * self.d_omega

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_t)

    def phase_space(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.linspace(self.x_min, self.x_max, self.n_x, endpoint=False)
        p = np.linspace(self.p_min, self.p_max, self.n_p, endpoint=False)
        return x, p

    def replace(self, **changes) -> "GridSpec":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return GridSpec(**d)


@dataclass(frozen=True)
class DerivedScales:
    plasma_frequency: float
    scaled_coupling_sq: float  # lambda-bar^2 = 2 c^2 lambda^2 / L
    beta: float  # 1/(k_B T); inf at T = 0
    density_of_states: float  # modes per unit angular frequency

    @property
    def scaled_coupling(self) -> float:
        return math.sqrt(self.scaled_coupling_sq)


def derive_scales(params: PhysicalParams) -> DerivedScales:
    p = params
    beta = math.inf if p.T == 0 else 1.0 / (p.kB * p.T)
    return DerivedScales(
        plasma_frequency=p.c * p.lam**2 / (2.0 * p.m * p.omega0**2),
        scaled_coupling_sq=2.0 * p.c**2 * p.lam**2 / p.L,
        beta=beta,
        # kappa_n = 2 pi n / L, omega_n = c kappa_n -> spacing 2 pi c / L
        density_of_states=p.L / (2.0 * math.pi * p.c),
    )


_PHYS_REQUIRED = ("M", "Omega", "m", "omega0", "lam", "c", "L", "T", "hbar", "kB")
_PHYS_OPTIONAL = ("ir_cutoff", "delta_omega1_sq")
_GRID_KEYS = tuple(f.name for f in fields(GridSpec))
_INT_KEYS = {"n_omega", "n_t", "n_x", "n_p"}


def load_config(text: str, *, require_grid: bool = False) -> tuple[PhysicalParams, GridSpec]:
    """Parse a flat ``key = value`` document into validated parameter objects.

    Physical constants listed in ``_PHYS_REQUIRED`` must be present; grid keys
    fall back to :class:`GridSpec` defaults unless ``require_grid`` is set.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str  # keep case: M and m are different keys
    try:
        cp.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("<document>", f"cannot parse: {exc}") from exc
    raw = dict(cp["config"])

    known = set(_PHYS_REQUIRED) | set(_PHYS_OPTIONAL) | set(_GRID_KEYS)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(unknown[0], f"unknown keys: {', '.join(unknown)}")
    required = list(_PHYS_REQUIRED) + (list(_GRID_KEYS) if require_grid else [])
    for key in required:
        if key not in raw:
            raise ConfigError(key, "missing required key")

    values = {}
    for key, text_value in raw.items():
        try:
            values[key] = int(text_value) if key in _INT_KEYS else float(text_value)
        except ValueError as exc:
            raise ConfigError(key, f"not a number: {text_value!r}") from exc

    phys = PhysicalParams(**{k: values[k] for k in values if k in _PHYS_REQUIRED + _PHYS_OPTIONAL})
    grid = GridSpec(**{k: values[k] for k in values if k in _GRID_KEYS})
    validate_pair(phys, grid)
    return phys, grid


def validate_pair(params: PhysicalParams, grid: GridSpec) -> None:
    mode_spacing = 2.0 * math.pi * params.c / params.L
    if mode_spacing >= grid.d_omega:
        raise ConfigError(
            "L",
            f"mode spacing 2*pi*c/L = {mode_spacing:.4g} is not below the grid resolution "
            f"{grid.d_omega:.4g}",
        )
    if params.ir_cutoff >= grid.cutoff:
        raise ConfigError("ir_cutoff", "ir_cutoff must lie below the band limit")


def dump_config(params: PhysicalParams, grid: GridSpec) -> str:
    """Serialize to the flat format; ``repr`` keeps floats bit-identical on reload."""
    lines = ["# physical constants"]
    lines += [f"{f.name} = {getattr(params, f.name)!r}" for f in fields(params)]
    lines.append("# grid")
    lines += [f"{f.name} = {getattr(grid, f.name)!r}" for f in fields(grid)]
    return "\n".join(lines) + "\n"


def default_config_text() -> str:
    return dump_config(PhysicalParams(), GridSpec())
