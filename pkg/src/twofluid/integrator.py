"""Fixed-step RK4 time advancement with an integrating factor on viscosity.

The integrating-factor scheme is the Lawson form of classical RK4: the
diffusion symbol is propagated exactly by ``exp(L dt)`` and only the
remaining terms (advection, Lorentz coupling, friction, Maxwell curls) are
integrated explicitly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .dynamics import (
    BULK_CURRENT,
    TRUNCATED,
    BulkCurrentState,
    Formulation,
    NsmState,
    PhysicalParams,
    from_bulk_current,
    kernel,
    to_bulk_current,
    viscous_symbol,
)
from .spectral import SpectralField, ball_mask, project_half

RK4_IF = "rk4-integrating-factor"
RK4_PLAIN = "rk4-plain"
SCHEMES = (RK4_IF, RK4_PLAIN)

T_END_REACHED = "t_end reached"
BLOWUP = "blowup"
USER_STOP = "user stop"


class CFLError(ValueError):
    """Time step exceeds a stability limit."""


class BlowupError(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"non-finite values detected at t = {t:.6g}")
        self.t = t


class StopRun(Exception):
    """Raised by an observer to end a run early."""


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float = 0.0
    scheme: str = RK4_IF
    cfl_safety: float = 0.5

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def wave_dt_limit(dx: float, params: PhysicalParams, cfl_safety: float) -> float:
    return cfl_safety * dx * math.sqrt(params.eps0 * params.mu0)


def advective_dt_limit(dx: float, vmax: float, cfl_safety: float) -> float:
    return math.inf if vmax == 0 else cfl_safety * dx / vmax


def _max_speed(grid, y_half: np.ndarray) -> float:
    return float(np.abs(grid.inverse_half(y_half[:2])).max())


def check_cfl(state, params: PhysicalParams, cfg: StepperConfig) -> None:
    """Raise :class:`CFLError` if ``cfg.dt`` violates the wave or advective limit."""
    _check_cfl(state.grid, state.grid.half(state.stack()), params, cfg)


def _check_cfl(grid, y_half, params, cfg) -> None:
    dx = grid.dx
    wave = wave_dt_limit(dx, params, cfg.cfl_safety)
    if cfg.dt > wave:
        raise CFLError(f"dt = {cfg.dt:g} exceeds the Maxwell wave limit {wave:.6g}")
    vmax = _max_speed(grid, y_half)
    adv = advective_dt_limit(dx, vmax, cfg.cfl_safety)
    if cfg.dt > adv:
        raise CFLError(f"dt = {cfg.dt:g} exceeds the advective limit {adv:.6g} (max|v| = {vmax:.4g})")


@lru_cache(maxsize=32)
def propagators(grid, params: PhysicalParams, form: Formulation, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """exp(L dt/2) and exp(L dt) for the diagonal diffusion symbol L."""
    half = np.exp(0.5 * dt * viscous_symbol(grid, params, form))
    return half, half * half


def lawson_rk4(y: np.ndarray, dt: float, nonlinear: Callable, props=None, t: float | None = None) -> np.ndarray:
    """One RK4 step of y' = L y + nonlinear(y) with L propagated exactly.

    ``props`` is the pair (exp(L dt/2), exp(L dt)); ``None`` gives plain RK4
    on y' = nonlinear(y). When ``t`` is given the right-hand side is called as
    ``nonlinear(y, stage_time)``.
    """
    def g(x, c=0.0):
        return nonlinear(x) if t is None else nonlinear(x, t + c * dt)
    if props is None:
        k1 = g(y)
        k2 = g(y + 0.5 * dt * k1, 0.5)
        k3 = g(y + 0.5 * dt * k2, 0.5)
        k4 = g(y + dt * k3, 1.0)
        return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    half, full = props
    k1 = g(y)
    k2 = g(half * (y + 0.5 * dt * k1), 0.5)
    k3 = g(half * y + 0.5 * dt * k2, 0.5)
    k4 = g(full * y + dt * half * k3, 1.0)
    return full * y + (dt / 6.0) * (full * k1 + 2 * half * (k2 + k3) + k4)


def _stepper(grid, params, form, cfg) -> Callable[[np.ndarray], np.ndarray]:
    use_if = cfg.scheme == RK4_IF
    f = kernel(grid, params, form, include_viscous=not use_if)
    props = propagators(grid, params, form, cfg.dt) if use_if else None
    return lambda y: project_half(grid, lawson_rk4(y, cfg.dt, f, props))


def _state_class(form: Formulation):
    return BulkCurrentState if form.tag == BULK_CURRENT else NsmState


def step(state, params: PhysicalParams, form: Formulation, cfg: StepperConfig, check: bool = True):
    """Advance ``state`` by ``cfg.dt``; the result is re-projected.

    The state type must match the formulation: :class:`BulkCurrentState` for
    the bulk-current form, :class:`NsmState` otherwise.
    """
    cls = _state_class(form)
    if not isinstance(state, cls):
        raise TypeError(f"{form.tag} formulation steps {cls.__name__}")
    grid = state.grid
    y = grid.half(state.stack())
    if check:
        _check_cfl(grid, y, params, cfg)
    y = _stepper(grid, params, form, cfg)(y)
    t = state.t + cfg.dt
    if not np.all(np.isfinite(y)):
        raise BlowupError(t)
    return cls.from_stack(grid, t, grid.extend(y))


@dataclass
class RunSummary:
    final_state: NsmState
    steps: int
    wall_time: float
    reason: str
    blowup_time: float | None = None


def run(
    initial: NsmState,
    params: PhysicalParams,
    form: Formulation,
    cfg: StepperConfig,
    observers: Sequence[Callable] = (),
    cadence: int = 10,
    hooks: Sequence[Callable] = (),
) -> RunSummary:
    """Integrate from ``initial`` to ``cfg.t_end``.

    ``hooks`` are called with ``(state, step_index)`` after every step and at
    step 0; ``observers`` likewise but only when ``step_index % cadence == 0``.
    Both must treat the state as read-only. An observer may raise
    :class:`StopRun`. For the truncated form the initial data is cut off
    first; for the bulk-current form integration happens in (u, j) variables
    and callbacks receive the mapped-back velocities.
    """
    if cadence < 1:
        raise ValueError("cadence must be >= 1")
    t0 = time.perf_counter()
    grid = initial.grid
    state = initial
    if form.tag == TRUNCATED:
        mask = ball_mask(grid, form.k_max)
        state = initial.map(lambda f: SpectralField(f.grid, f.coeffs * mask))
    bulk = form.tag == BULK_CURRENT
    cls = _state_class(form)
    y = grid.half((to_bulk_current(state) if bulk else state).stack())
    advance = _stepper(grid, params, form, cfg)

    def view(y, i):
        w = cls.from_stack(grid, initial.t + i * cfg.dt, grid.extend(y))
        return from_bulk_current(w) if bulk else w

    def notify(y, i):
        on_cadence = i % cadence == 0
        if not hooks and not (observers and on_cadence):
            return
        s = view(y, i)
        for h in hooks:
            h(s, i)
        if on_cadence:
            for obs in observers:
                obs(s, i)

    steps = 0
    reason = T_END_REACHED
    blowup_t = None
    try:
        _check_cfl(grid, y, params, cfg)
        notify(y, 0)
        for i in range(1, cfg.n_steps + 1):
            y_next = advance(y)
            if not np.all(np.isfinite(y_next)):
                raise BlowupError(initial.t + i * cfg.dt)
            y = y_next
            steps = i
            if i % cadence == 0:
                # velocities grow, so the advective limit is re-checked as we go
                _check_cfl(grid, y, params, cfg)
            notify(y, i)
    except StopRun:
        reason = USER_STOP
    except BlowupError as exc:
        reason = BLOWUP
        blowup_t = exc.t
    return RunSummary(view(y, steps), steps, time.perf_counter() - t0, reason, blowup_t)
