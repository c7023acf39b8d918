"""Named initial-data presets with their parameter overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import NsmState, PhysicalParams
from .spectral import Grid, SpectralField, random_field
from .thresholds import compute_constants, initial_data_norms, smallness_threshold


@dataclass(frozen=True)
class Scenario:
    name: str
    state: NsmState
    overrides: dict


def _wavenumber(grid: Grid) -> float:
    return 2 * math.pi / grid.L


def plane_wave(grid: Grid, t: float = 0.0, light_speed: float = 1.0) -> tuple[SpectralField, SpectralField]:
    """E = (0, cos(k(x1 - c t)), 0), B = (0, 0, cos(k(x1 - c t)) / c), with k the base wavenumber."""
    k = _wavenumber(grid)
    E = SpectralField.from_function(grid, lambda x: (0 * x[0], np.cos(k * (x[0] - light_speed * t)), 0 * x[0]))
    B = SpectralField.from_function(grid, lambda x: (0 * x[0], 0 * x[0], np.cos(k * (x[0] - light_speed * t)) / light_speed))
    return E, B


def taylor_green(grid: Grid, amplitude: float = 1.0) -> SpectralField:
    """(-cos x1 sin x2, sin x1 cos x2, 0), an exact decaying Navier-Stokes solution."""
    k = _wavenumber(grid)
    return SpectralField.from_function(
        grid,
        lambda x: (
            -amplitude * np.cos(k * x[0]) * np.sin(k * x[1]),
            amplitude * np.sin(k * x[0]) * np.cos(k * x[1]),
            0 * x[0],
        ),
    )


def sine_shear(grid: Grid) -> SpectralField:
    """(0, sin x1, 0)."""
    k = _wavenumber(grid)
    return SpectralField.from_function(grid, lambda x: (0 * x[0], np.sin(k * x[0]), 0 * x[0]))


def _random_state(grid: Grid, seed: int, rms: float, k_band: float) -> NsmState:
    """Four independent random solenoidal fields, each with the given RMS value."""
    rng = np.random.default_rng(seed)
    band = min(k_band, grid.dealias_cutoff)
    fields = []
    for _ in range(4):
        f = random_field(grid, rng, k_band=band)
        fields.append((rms * math.sqrt(grid.volume) / f.norm()) * f)
    return NsmState(0.0, *fields)


def _maxwell_wave(grid, params, seed, c):
    E, B = plane_wave(grid, light_speed=math.sqrt(params.light_speed_sq))
    z = SpectralField.zeros(grid)
    return NsmState(0.0, z, z, E, B)


def _heat_decay(grid, params, seed, c):
    v = sine_shear(grid)
    z = SpectralField.zeros(grid)
    return NsmState(0.0, v, v, z, z)


def _taylor_green(grid, params, seed, c):
    v = taylor_green(grid)
    z = SpectralField.zeros(grid)
    return NsmState(0.0, v, v, z, z)


def _gwp_2d(grid, params, seed, c):
    if grid.d != 2:
        raise ValueError("2d-gwp needs dimension 2")
    return _random_state(grid, seed, rms=1.0, k_band=8)


def _weak_3d(grid, params, seed, c):
    if grid.d != 3:
        raise ValueError("3d-weak needs dimension 3")
    return _random_state(grid, seed, rms=1.0, k_band=4)


def _small_3d(grid, params, seed, c):
    """Random data scaled so its threshold norm is 0.9 of the smallness threshold."""
    if grid.d != 3:
        raise ValueError("3d-small needs dimension 3")
    state = _random_state(grid, seed, rms=1.0, k_band=4)
    threshold = smallness_threshold(compute_constants(params, c)[2])
    if not threshold > 0:
        raise ValueError("smallness threshold is zero for these parameters (alpha = 0 or nu = 0)")
    scale = 0.9 * threshold / initial_data_norms(state).combined
    return state.map(lambda f: scale * f)


def _bulk_current(grid, params, seed, c):
    return _random_state(grid, seed, rms=0.5, k_band=4)


Builder = Callable[[Grid, PhysicalParams, int, float], NsmState]
SCENARIOS: dict[str, tuple[Builder, dict, str]] = {
    "2d-gwp": (_gwp_2d, {}, "2D random O(1) data for the global well-posedness regime"),
    "3d-small": (_small_3d, {}, "3D random data scaled to 0.9 of the small-data threshold"),
    "3d-weak": (_weak_3d, {"nu_minus": 0.1, "nu_plus": 0.1}, "3D random O(1) data at low viscosity for the energy inequality"),
    "maxwell-wave": (_maxwell_wave, {"e": 0.0}, "decoupled electromagnetic plane wave, fluids at rest"),
    "heat-decay": (_heat_decay, {"e": 0.0, "alpha": 0.0}, "decoupled single-mode viscous decay"),
    "taylor-green": (_taylor_green, {}, "symmetric two-fluid Taylor-Green vortex, no fields"),
    "bulk-current-equivalence": (_bulk_current, {}, "random unit-constant data for the u/j change of variables"),
}


def scenario_names() -> list[str]:
    return sorted(SCENARIOS)


def scenario_overrides(name: str) -> dict:
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; expected one of {scenario_names()}")
    return dict(SCENARIOS[name][1])


def scenario(name: str, grid: Grid, seed: int = 0, c: float = 1.0, params: PhysicalParams | None = None) -> Scenario:
    """Initial state for ``name``; ``params`` defaults to unit constants with the scenario overrides."""
    overrides = scenario_overrides(name)
    if params is None:
        params = PhysicalParams(**overrides)
    builder = SCENARIOS[name][0]
    return Scenario(name, builder(grid, params, seed, c), overrides)
