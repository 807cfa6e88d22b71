"""Experiment configuration: a flat key = value text format.

One key per line, full-line # comments and blank lines allowed, values typed
by field.  The same struct drives every runner subcommand; unused keys for a
given subcommand are simply ignored by it.  Serialization round-trips
losslessly (floats via repr), and the cache key is a digest over the
canonical serialization of the physics-affecting fields only.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .disorder import DisorderChannel, DisorderModel, MonteCarlo, Quadrature
from .dynamics import IntegratorConfig, QuenchSpec
from .errors import ConfigError, RabiQuenchError
from .scaling import TableSpec, default_table_spec

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "cache_key",
]

# artifact destination and cache switch never change the numbers
NON_PHYSICS_FIELDS = ("output_dir", "cache")

CHANNELS = ("none", "time", "param")
SCHEMES = ("quadrature", "mc")
STEP_MODES = ("fixed", "adaptive")
PREDICT_KINDS = ("apt", "kzm", "kzm_average", "freezeout")


@dataclass
class ExperimentConfig:
    """Every knob of the runner, with physically sensible defaults.

    Units: couplings and dispersions dimensionless, times are omega*tau,
    energies hbar*omega.
    """

    g_final: float = 1.0            # final coupling in [0, 1]
    omega_tau: float = 1e3          # single-quench duration
    grid_min: float = 1e3           # sweep grid, inclusive bounds
    grid_max: float = 1e4
    points_per_decade: int = 8
    window_min: float = 1e3         # fit window
    window_max: float = 1e4
    channel: str = "none"           # none | time | param
    sigma: float = 0.0              # disorder dispersion
    scheme: str = "quadrature"      # quadrature | mc
    n_nodes: int = 33
    n_samples: int = 1000
    seed: int = 0
    step_mode: str = "fixed"        # fixed | adaptive
    omega_dt: float = 5e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    constraint_tol: float = 1e-8
    table_id: int = 1
    predict_kind: str = "kzm_average"   # apt | kzm | kzm_average | freezeout
    delta: float = 0.0              # disorder draw for per-realization forms
    input_csv: str = ""             # data source for the fit subcommand
    output_dir: str = "out"
    cache: str = "on"               # on | off

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.step_mode not in STEP_MODES:
            raise ConfigError(
                f"step_mode must be one of {STEP_MODES}, got {self.step_mode!r}"
            )
        if self.predict_kind not in PREDICT_KINDS:
            raise ConfigError(
                f"predict_kind must be one of {PREDICT_KINDS}, got {self.predict_kind!r}"
            )
        if self.cache not in ("on", "off"):
            raise ConfigError(f"cache must be on or off, got {self.cache!r}")

    # -- typed views onto the domain objects --------------------------------

    def quench_spec(self) -> QuenchSpec:
        return _lift(QuenchSpec, g_final=self.g_final, omega_tau=self.omega_tau)

    def disorder_model(self) -> DisorderModel:
        if self.channel == "none":
            if self.sigma != 0.0:
                raise ConfigError("sigma must be 0 when channel = none")
            return _lift(DisorderModel, channel=DisorderChannel.TIME, sigma=0.0)
        ch = DisorderChannel.TIME if self.channel == "time" else DisorderChannel.PARAM
        return _lift(DisorderModel, channel=ch, sigma=self.sigma)

    def averaging_scheme(self):
        if self.scheme == "quadrature":
            return _lift(Quadrature, n_nodes=self.n_nodes)
        return _lift(MonteCarlo, n_samples=self.n_samples, seed=self.seed)

    def integrator(self) -> IntegratorConfig:
        return _lift(
            IntegratorConfig,
            step_mode=self.step_mode,
            omega_dt=self.omega_dt,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            constraint_tol=self.constraint_tol,
        )

    def grid_bounds(self):
        if not 0 < self.grid_min < self.grid_max:
            raise ConfigError(
                f"need 0 < grid_min < grid_max, got [{self.grid_min}, {self.grid_max}]"
            )
        return self.grid_min, self.grid_max

    def fit_window(self):
        if not 0 < self.window_min < self.window_max:
            raise ConfigError(
                f"need 0 < window_min < window_max, "
                f"got [{self.window_min}, {self.window_max}]"
            )
        return self.window_min, self.window_max

    def table_spec(self) -> TableSpec:
        base = _lift(default_table_spec, self.table_id)
        return _lift(
            TableSpec,
            table_id=base.table_id,
            sigma_list=base.sigma_list,
            windows=base.windows,
            points_per_decade=self.points_per_decade,
            scheme=self.averaging_scheme(),
            cfg=self.integrator(),
        )


def _lift(ctor, *args, **kwargs):
    """Build a domain object, reporting invariant violations as config errors."""
    try:
        return ctor(*args, **kwargs)
    except ConfigError:
        raise
    except (RabiQuenchError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


_FIELD_TYPES = None


def _field_types():
    global _FIELD_TYPES
    if _FIELD_TYPES is None:
        _FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
    return _FIELD_TYPES


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key = value format; unknown or repeated keys are errors."""
    types = _field_types()
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: repeated key {key!r}")
        kind = types[key]
        try:
            if kind in ("float", float):
                seen[key] = float(value)
            elif kind in ("int", int):
                seen[key] = int(value)
            else:
                seen[key] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return _lift(ExperimentConfig, **seen)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form: declaration order, repr-exact floats.

    parse_config(serialize_config(c)) == c for any valid c (strings are
    written bare, so they must not carry leading/trailing whitespace).
    """
    lines = [f"{f.name} = {getattr(config, f.name)}" for f in fields(ExperimentConfig)]
    return "\n".join(lines) + "\n"


def cache_key(config: ExperimentConfig) -> str:
    """Digest over the physics-affecting fields; path and cache knobs excluded."""
    lines = []
    for f in fields(ExperimentConfig):
        if f.name in NON_PHYSICS_FIELDS:
            continue
        lines.append(f"{f.name} = {getattr(config, f.name)}")
    payload = "\n".join(lines).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()
