"""Run configuration: a flat TOML file with one ``[params]`` table."""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dynamics import FORMULATIONS, TRUNCATED, Formulation, PhysicalParams, effective_params
from .integrator import SCHEMES, RK4_IF, StepperConfig, wave_dt_limit
from .spectral import Grid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    """Malformed, unknown or out-of-range configuration entry."""


_INT, _FLOAT, _STR = "int", "float", "str"
TOP_KEYS = {
    "dimension": _INT, "N": _INT, "L": _FLOAT, "dt": _FLOAT, "t_end": _FLOAT,
    "formulation": _STR, "k_max": _FLOAT, "scheme": _STR, "scenario": _STR,
    "s1": _FLOAT, "c": _FLOAT, "cadence": _INT, "output_dir": _STR, "seed": _INT,
    "cfl_safety": _FLOAT,
}
PARAM_KEYS = {name: (_INT if name == "Z" else _FLOAT) for name in PhysicalParams.names()}
REQUIRED = ("dimension", "N", "dt", "t_end", "scenario")


@dataclass(frozen=True)
class RunConfig:
    dimension: int
    N: int
    dt: float
    t_end: float
    scenario: str
    L: float = 2 * math.pi
    formulation: str = "physical"
    k_max: float | None = None
    scheme: str = RK4_IF
    s1: float = 0.5
    c: float = 1.0
    cadence: int = 10
    output_dir: str = "output"
    seed: int = 0
    cfl_safety: float = 0.5
    params: dict = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return Grid(self.dimension, self.N, self.L)

    @property
    def form(self) -> Formulation:
        return Formulation(self.formulation, self.k_max)

    @property
    def stepper(self) -> StepperConfig:
        return StepperConfig(self.dt, self.t_end, self.scheme, self.cfl_safety)

    def physical_params(self) -> PhysicalParams:
        """Defaults, then the scenario's overrides, then the ``[params]`` table."""
        from .scenarios import scenario_overrides

        return PhysicalParams(**{**scenario_overrides(self.scenario), **self.params})

    def as_dict(self) -> dict:
        return asdict(self)


def _typed(name: str, value, kind: str):
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return value
    if kind == _FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{name} must be a string, got {value!r}")
    return value


def _check(ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(message)


def validate(cfg: RunConfig) -> RunConfig:
    """Range checks; raises :class:`ConfigError` naming the field and bound."""
    from .scenarios import SCENARIOS

    _check(cfg.dimension in (2, 3), f"dimension must be 2 or 3, got {cfg.dimension}")
    _check(cfg.N % 2 == 0, f"N must be even, got {cfg.N}")
    _check(cfg.N >= 8, f"N must be >= 8, got {cfg.N}")
    _check(cfg.L > 0, f"L must be > 0, got {cfg.L}")
    _check(cfg.dt > 0, f"dt must be > 0, got {cfg.dt}")
    _check(cfg.t_end >= 0, f"t_end must be >= 0, got {cfg.t_end}")
    _check(cfg.formulation in FORMULATIONS, f"formulation must be one of {FORMULATIONS}, got {cfg.formulation!r}")
    if cfg.formulation == TRUNCATED:
        _check(cfg.k_max is not None and cfg.k_max > 0, "k_max must be > 0 for the truncated formulation")
    _check(cfg.scheme in SCHEMES, f"scheme must be one of {SCHEMES}, got {cfg.scheme!r}")
    _check(cfg.scenario in SCENARIOS, f"scenario must be one of {sorted(SCENARIOS)}, got {cfg.scenario!r}")
    _check(0 < cfg.s1 < 1, f"s1 must lie in (0, 1), got {cfg.s1}")
    _check(cfg.c > 0, f"c must be > 0, got {cfg.c}")
    _check(cfg.cadence >= 1, f"cadence must be >= 1, got {cfg.cadence}")
    _check(cfg.seed >= 0, f"seed must be >= 0, got {cfg.seed}")
    _check(0 < cfg.cfl_safety <= 1, f"cfl_safety must lie in (0, 1], got {cfg.cfl_safety}")
    try:
        params = cfg.physical_params()
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from None
    p = effective_params(params, cfg.form)
    limit = wave_dt_limit(cfg.L / cfg.N, p, cfg.cfl_safety)
    _check(cfg.dt <= limit, f"dt = {cfg.dt:g} exceeds the Maxwell CFL limit {limit:.6g} "
           f"(cfl_safety * dx * sqrt(eps0 mu0) with dx = {cfg.L / cfg.N:.6g})")
    return cfg


def config_from_dict(raw: dict) -> RunConfig:
    values = {}
    for key, value in raw.items():
        if key == "params":
            if not isinstance(value, dict):
                raise ConfigError("params must be a table")
            params = {}
            for pk, pv in value.items():
                if pk not in PARAM_KEYS:
                    raise ConfigError(f"unknown key params.{pk}; expected one of {sorted(PARAM_KEYS)}")
                params[pk] = _typed(f"params.{pk}", pv, PARAM_KEYS[pk])
            values["params"] = params
        elif key in TOP_KEYS:
            values[key] = _typed(key, value, TOP_KEYS[key])
        else:
            raise ConfigError(f"unknown key {key!r}")
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    return validate(RunConfig(**values))


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return config_from_dict(raw)
