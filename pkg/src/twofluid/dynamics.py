"""Two-fluid Navier-Stokes-Maxwell right-hand sides.

Unknowns are the anion/cation velocities ``v_minus``, ``v_plus`` and the
electromagnetic pair ``E``, ``B``. Pressures are eliminated by projecting the
whole momentum right-hand side onto divergence-free fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from .spectral import (
    Grid,
    GridMismatchError,
    SpectralField,
    ball_mask,
    dealiased_products,
    curl_half,
    divergence,
    project_half,
)

PHYSICAL = "physical"
NORMALIZED = "normalized"
BULK_CURRENT = "bulk-current"
TRUNCATED = "truncated"
FORMULATIONS = (PHYSICAL, NORMALIZED, BULK_CURRENT, TRUNCATED)

DIV_TOL = 1e-11


class RejectedStateError(ValueError):
    """State violates the solenoidal constraints beyond tolerance."""


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of the two-fluid system; every default is 1.

    ``e = 0`` decouples the fluids from the field and ``nu = 0`` gives the
    inviscid system; both are allowed for verification runs.
    """

    n: float = 1.0
    m_minus: float = 1.0
    m_plus: float = 1.0
    e: float = 1.0
    Z: int = 1
    eps0: float = 1.0
    mu0: float = 1.0
    nu_minus: float = 1.0
    nu_plus: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("n", "m_minus", "m_plus", "eps0", "mu0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("e", "nu_minus", "nu_plus", "alpha"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if int(self.Z) != self.Z or self.Z < 1:
            raise ValueError(f"Z must be an integer >= 1, got {self.Z}")

    @classmethod
    def unit(cls, **overrides) -> PhysicalParams:
        return cls(**overrides)

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def with_(self, **overrides) -> PhysicalParams:
        return replace(self, **overrides)

    @property
    def mu_minus(self) -> float:
        return self.nu_minus / (self.n * self.m_minus)

    @property
    def mu_plus(self) -> float:
        return self.nu_plus / (self.n * self.m_plus)

    @property
    def a_minus(self) -> float:
        return self.e / self.m_minus

    @property
    def a_plus(self) -> float:
        return self.e * self.Z / self.m_plus

    @property
    def b_minus(self) -> float:
        return self.alpha / (self.n * self.m_minus)

    @property
    def b_plus(self) -> float:
        return self.alpha / (self.n * self.m_plus)

    @property
    def light_speed_sq(self) -> float:
        return 1.0 / (self.eps0 * self.mu0)

    def is_unit(self) -> bool:
        unit = PhysicalParams(alpha=self.alpha)
        return all(getattr(self, k) == getattr(unit, k) for k in self.names() if k != "alpha")


@dataclass(frozen=True)
class Formulation:
    tag: str = PHYSICAL
    k_max: float | None = None

    def __post_init__(self):
        if self.tag not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.tag!r}; expected one of {FORMULATIONS}")
        if self.tag == TRUNCATED and not (self.k_max is not None and self.k_max > 0):
            raise ValueError("truncated formulation needs k_max > 0")


@dataclass(frozen=True)
class NsmState:
    t: float
    v_minus: SpectralField
    v_plus: SpectralField
    E: SpectralField
    B: SpectralField

    def __post_init__(self):
        g = self.v_minus.grid
        for f in (self.v_plus, self.E, self.B):
            if f.grid != g:
                raise GridMismatchError("all state fields must share one grid")

    @property
    def grid(self) -> Grid:
        return self.v_minus.grid

    @property
    def slots(self) -> tuple[SpectralField, ...]:
        return (self.v_minus, self.v_plus, self.E, self.B)

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> NsmState:
        z = SpectralField.zeros(grid)
        return cls(t, z, z, z, z)

    def stack(self) -> np.ndarray:
        return np.stack([f.coeffs for f in self.slots])

    @classmethod
    def from_stack(cls, grid: Grid, t: float, arr: np.ndarray) -> NsmState:
        return cls(t, *(SpectralField(grid, a) for a in arr))

    def map(self, fn) -> NsmState:
        return NsmState(self.t, *(fn(f) for f in self.slots))


@dataclass(frozen=True)
class BulkCurrentState:
    """Bulk velocity u = (v- + v+)/2 and current j = (v+ - v-)/2."""

    t: float
    u: SpectralField
    j: SpectralField
    E: SpectralField
    B: SpectralField

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @property
    def slots(self) -> tuple[SpectralField, ...]:
        return (self.u, self.j, self.E, self.B)

    def stack(self) -> np.ndarray:
        return np.stack([f.coeffs for f in self.slots])

    @classmethod
    def from_stack(cls, grid: Grid, t: float, arr: np.ndarray) -> BulkCurrentState:
        return cls(t, *(SpectralField(grid, a) for a in arr))

    def map(self, fn) -> BulkCurrentState:
        return BulkCurrentState(self.t, *(fn(f) for f in self.slots))


@dataclass(frozen=True)
class Tangent:
    """Time derivative of the four slots, in the slot order of the state."""

    slots: tuple[SpectralField, ...] = field(default_factory=tuple)

    def stack(self) -> np.ndarray:
        return np.stack([f.coeffs for f in self.slots])

    def __getitem__(self, i: int) -> SpectralField:
        return self.slots[i]


def to_bulk_current(state: NsmState) -> BulkCurrentState:
    u = 0.5 * (state.v_minus + state.v_plus)
    j = 0.5 * (state.v_plus - state.v_minus)
    return BulkCurrentState(state.t, u, j, state.E, state.B)


def from_bulk_current(state: BulkCurrentState) -> NsmState:
    return NsmState(state.t, state.u - state.j, state.u + state.j, state.E, state.B)


def divergence_residuals(state) -> list[float]:
    """max |k . f_hat| over the max coefficient amplitude, per slot."""
    out = []
    for f in state.slots:
        amp = f.max_amplitude()
        out.append(float(np.abs(divergence(f)).max() / amp) if amp > 0 else 0.0)
    return out


def check_state(state) -> None:
    res = divergence_residuals(state)
    if max(res) > DIV_TOL:
        raise RejectedStateError(f"divergence residuals {res} exceed {DIV_TOL}")


def physical_kernel(grid: Grid, y: np.ndarray, p: PhysicalParams, include_viscous: bool) -> np.ndarray:
    """Tangent of the (v-, v+, E, B) system on a half-spectrum stack.

    Advection enters as ``v x curl(v)``, which differs from ``-(v . grad) v``
    by a gradient that the projection removes exactly on dealiased modes. The
    magnetic force is folded into the same product, so each species needs a
    single cross product ``v x (curl v -+ a B)``.
    """
    vm, vp, E, B = y
    w = curl_half(grid, y)
    gm, gp = w[0], w[1]
    if p.e > 0:
        gm = gm - p.a_minus * B
        gp = gp + p.a_plus * B
    _, (mom_m, mom_p) = dealiased_products(
        grid, {"vm": vm, "gm": gm, "vp": vp, "gp": gp}, crosses=[("vm", "gm"), ("vp", "gp")]
    )
    if p.e > 0:
        mom_m -= p.a_minus * E
        mom_p += p.a_plus * E
    slip = vp - vm
    out = np.empty_like(y)
    out[0] = project_half(grid, mom_m) + p.b_minus * slip
    out[1] = project_half(grid, mom_p) - p.b_plus * slip
    if include_viscous:
        out[0] -= p.mu_minus * grid.k2_h * vm
        out[1] -= p.mu_plus * grid.k2_h * vp
    out[2] = p.light_speed_sq * w[3] - (p.n * p.e / p.eps0) * (p.Z * vp - vm)
    out[3] = -w[2]
    return out


def bulk_kernel(grid: Grid, y: np.ndarray, alpha: float, include_viscous: bool) -> np.ndarray:
    """Tangent of the unit-constant (u, j, E, B) system on a half-spectrum stack.

    In rotational form the momentum sources reduce to
    ``u x curl u + j x (B + curl j)`` and ``u x (B + curl j) + j x curl u``.
    """
    u, j, E, B = y
    w = curl_half(grid, y)
    _, (u_wu, j_g, u_g, j_wu) = dealiased_products(
        grid,
        {"u": u, "j": j, "wu": w[0], "g": B + w[1]},
        crosses=[("u", "wu"), ("j", "g"), ("u", "g"), ("j", "wu")],
    )
    out = np.empty_like(y)
    out[0] = project_half(grid, u_wu + j_g)
    out[1] = project_half(grid, E + u_g + j_wu) - 2.0 * alpha * j
    if include_viscous:
        out[0] -= grid.k2_h * u
        out[1] -= grid.k2_h * j
    out[2] = w[3] - 2.0 * j
    out[3] = -w[2]
    return out


def effective_params(params: PhysicalParams, form: Formulation) -> PhysicalParams:
    """Constants actually used by ``form``: the normalized systems keep only alpha."""
    if form.tag in (NORMALIZED, BULK_CURRENT):
        return PhysicalParams(alpha=params.alpha)
    return params


def kernel(grid: Grid, params: PhysicalParams, form: Formulation, include_viscous: bool):
    """Half-spectrum tangent function ``y -> dy/dt`` for ``form``."""
    if form.tag == BULK_CURRENT:
        return lambda y: bulk_kernel(grid, y, params.alpha, include_viscous)
    params = effective_params(params, form)
    if form.tag == TRUNCATED:
        mask = grid.half(ball_mask(grid, form.k_max))
        return lambda y: physical_kernel(grid, y * mask, params, include_viscous) * mask
    return lambda y: physical_kernel(grid, y, params, include_viscous)


def _evaluate(state, params, form, include_viscous) -> Tangent:
    grid = state.grid
    y = grid.half(state.stack())
    dy = kernel(grid, params, form, include_viscous)(y)
    return Tangent(tuple(SpectralField(grid, c) for c in grid.extend(dy)))


def rhs(
    state: NsmState,
    params: PhysicalParams,
    form: Formulation = Formulation(),
    include_viscous: bool = True,
    check: bool = True,
) -> Tangent:
    """Time derivative of ``state`` under ``form``.

    For the truncated form every term is evaluated on the cut-off state and
    cut off again, which is the frequency-cutoff Galerkin system.
    ``include_viscous=False`` drops the diffusion terms (integrating-factor
    steppers treat them exactly).
    """
    if form.tag == BULK_CURRENT:
        raise ValueError("use rhs_bulk_current for the bulk-current formulation")
    if check:
        check_state(state)
    return _evaluate(state, params, form, include_viscous)


def rhs_bulk_current(
    state: BulkCurrentState,
    alpha: float,
    include_viscous: bool = True,
    check: bool = True,
) -> Tangent:
    """Unit-constant system in bulk velocity / current variables."""
    if check:
        check_state(state)
    return _evaluate(state, PhysicalParams(alpha=alpha), Formulation(BULK_CURRENT), include_viscous)


def viscous_symbol(grid: Grid, params: PhysicalParams, form: Formulation) -> np.ndarray:
    """Half-spectrum diffusion symbol per slot, broadcastable against a stack."""
    p = effective_params(params, form)
    mu = (p.mu_minus, p.mu_plus)
    k2 = grid.k2_h
    sym = np.zeros((4, 1) + k2.shape)
    sym[0, 0] = -mu[0] * k2
    sym[1, 0] = -mu[1] * k2
    if form.tag == TRUNCATED:
        sym = sym * grid.half(ball_mask(grid, form.k_max))
    return sym


def energy_weights(params: PhysicalParams) -> tuple[float, float, float, float]:
    """Weights w such that the conserved energy is sum_i w_i ||slot_i||^2 / 2."""
    p = params
    return (p.n * p.m_minus / p.eps0, p.n * p.m_plus / p.eps0, 1.0, p.light_speed_sq)
