import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from twofluid.dynamics import (
    BULK_CURRENT,
    NORMALIZED,
    PHYSICAL,
    TRUNCATED,
    BulkCurrentState,
    Formulation,
    NsmState,
    PhysicalParams,
    RejectedStateError,
    energy_weights,
    from_bulk_current,
    rhs,
    rhs_bulk_current,
    to_bulk_current,
)
from twofluid.lp import sobolev_norm
from twofluid.spectral import (
    ADVECTION,
    CROSS,
    Grid,
    SpectralField,
    ball_mask,
    curl,
    gradient,
    laplacian,
    leray_project,
    pointwise_product,
    scalar_from_physical,
)

seeds = st.integers(0, 2**31 - 1)
positive = st.floats(0.2, 3.0)
GRID = Grid(2, 16)


def zero(x):
    return 0 * x[0]


def test_zero_state_gives_zero_tangent():
    t = rhs(NsmState.zeros(GRID), PhysicalParams())
    assert all(f.norm() == 0 for f in t.slots)
    tb = rhs_bulk_current(to_bulk_current(NsmState.zeros(GRID)), 1.0)
    assert all(f.norm() == 0 for f in tb.slots)


def test_maxwell_tangent_oracle():
    E = SpectralField.from_function(GRID, lambda x: (zero(x), np.cos(x[0]), zero(x)))
    B = SpectralField.from_function(GRID, lambda x: (zero(x), zero(x), np.cos(x[0])))
    z = SpectralField.zeros(GRID)
    t = rhs(NsmState(0.0, z, z, E, B), PhysicalParams())
    want_e = SpectralField.from_function(GRID, lambda x: (zero(x), np.sin(x[0]), zero(x)))
    want_b = SpectralField.from_function(GRID, lambda x: (zero(x), zero(x), np.sin(x[0])))
    assert (t.slots[2] - want_e).norm() < 1e-13
    assert (t.slots[3] - want_b).norm() < 1e-13
    # the electric field drives both species with opposite signs (unit masses, Z = 1)
    assert (t.slots[0] + leray_project(E)).norm() < 1e-13
    assert (t.slots[1] - leray_project(E)).norm() < 1e-13


def test_symmetric_species_cancel_sources():
    s = random_state(GRID, 3, k_band=4)
    v = s.v_minus
    z = SpectralField.zeros(GRID)
    t = rhs(NsmState(0.0, v, v, z, z), PhysicalParams())
    assert t.slots[2].norm() < 1e-13 and t.slots[3].norm() < 1e-13
    ns = -leray_project(pointwise_product(v, v, ADVECTION)) + laplacian(v)
    assert (t.slots[0] - ns).norm() < 1e-12 * ns.norm()
    assert (t.slots[1] - ns).norm() < 1e-12 * ns.norm()


def _reference_tangent(state, p):
    """Direct term-by-term evaluation with the advective form of the nonlinearity."""
    vm, vp, E, B = state.slots
    mom_m = -pointwise_product(vm, vm, ADVECTION) - p.a_minus * (E + pointwise_product(vm, B, CROSS))
    mom_p = -pointwise_product(vp, vp, ADVECTION) + p.a_plus * (E + pointwise_product(vp, B, CROSS))
    slip = vp - vm
    dvm = leray_project(mom_m) + p.b_minus * slip + p.mu_minus * laplacian(vm)
    dvp = leray_project(mom_p) - p.b_plus * slip + p.mu_plus * laplacian(vp)
    dE = p.light_speed_sq * curl(B) - (p.n * p.e / p.eps0) * (p.Z * vp - vm)
    dB = -curl(E)
    return dvm, dvp, dE, dB


@given(seeds, positive, positive, positive, st.integers(1, 3), positive, positive)
def test_tangent_matches_advective_reference(seed, m, e, nu, Z, eps0, alpha):
    p = PhysicalParams(m_plus=m, e=e, Z=Z, nu_minus=nu, eps0=eps0, alpha=alpha)
    s = random_state(GRID, seed, k_band=5)
    got = rhs(s, p)
    for a, b in zip(got.slots, _reference_tangent(s, p)):
        assert (a - b).norm() <= 1e-12 * max(b.norm(), 1.0)


@given(seeds, positive, positive, positive, st.integers(1, 3), positive, positive, positive)
def test_tangent_energy_balance(seed, n, m_minus, m_plus, Z, nu, eps0, alpha):
    """d/dt of the weighted energy equals minus the dissipation, for band-limited data."""
    p = PhysicalParams(n=n, m_minus=m_minus, m_plus=m_plus, Z=Z, nu_minus=nu, nu_plus=2 * nu,
                       eps0=eps0, mu0=1.5, alpha=alpha)
    s = random_state(GRID, seed, k_band=5)
    t = rhs(s, p)
    w = energy_weights(p)
    dE = sum(wi * f.inner(g) for wi, f, g in zip(w, s.slots, t.slots))
    slip = s.v_minus - s.v_plus
    diss = (p.nu_minus * sobolev_norm(s.v_minus, 1, True) ** 2 + p.nu_plus * sobolev_norm(s.v_plus, 1, True) ** 2
            + p.alpha * slip.inner(slip)) / p.eps0
    assert abs(dE + diss) <= 1e-10 * diss


@given(seeds)
def test_tangent_is_real_and_solenoidal(seed):
    t = rhs(random_state(Grid(3, 8), seed), PhysicalParams())
    for f in t.slots:
        assert f.realness_defect() < 1e-12
        assert np.abs(1j * np.einsum("i...,i...->...", f.grid.kvec, f.coeffs)).max() < 1e-11 * max(f.max_amplitude(), 1)


def test_bulk_current_maps():
    s = random_state(GRID, 4)
    v = s.v_minus
    b = to_bulk_current(NsmState(0.0, v, v, s.E, s.B))
    assert np.array_equal(b.u.coeffs, v.coeffs) and b.j.norm() == 0
    b = to_bulk_current(NsmState(0.0, -v, v, s.E, s.B))
    assert b.u.norm() == 0 and np.array_equal(b.j.coeffs, v.coeffs)
    back = from_bulk_current(to_bulk_current(s))
    for a, c in zip(back.slots, s.slots):
        assert np.abs(a.coeffs - c.coeffs).max() < 1e-15


@given(seeds, st.floats(0.0, 3.0))
def test_bulk_tangent_is_pushforward(seed, alpha):
    s = random_state(GRID, seed, scale=0.1)
    p = PhysicalParams(alpha=alpha)
    t = rhs(s, p, Formulation(NORMALIZED))
    push = to_bulk_current(NsmState(0.0, *t.slots))
    got = rhs_bulk_current(to_bulk_current(s), alpha)
    for a, b in zip(got.slots, push.slots):
        assert np.abs(a.coeffs - b.coeffs).max() <= 1e-12 * max(np.abs(b.coeffs).max(), 1e-300)


def test_bulk_reduces_to_navier_stokes():
    u = random_state(GRID, 6, k_band=5).v_plus
    z = SpectralField.zeros(GRID)
    t = rhs_bulk_current(BulkCurrentState(0.0, u, z, z, z), 1.0)
    ns = -leray_project(pointwise_product(u, u, ADVECTION)) + laplacian(u)
    assert (t.slots[0] - ns).norm() < 1e-12 * ns.norm()
    assert max(f.norm() for f in t.slots[1:]) < 1e-13


def test_normalized_form_ignores_constants():
    s = random_state(GRID, 7)
    odd = PhysicalParams(n=2, m_minus=3, e=0.5, eps0=4, nu_plus=0.1, alpha=0.7)
    a = rhs(s, odd, Formulation(NORMALIZED))
    b = rhs(s, PhysicalParams(alpha=0.7))
    for f, g in zip(a.slots, b.slots):
        assert np.array_equal(f.coeffs, g.coeffs)


def test_truncated_tangent_stays_in_ball():
    s = random_state(GRID, 8)
    k = 3.5
    t = rhs(s, PhysicalParams(), Formulation(TRUNCATED, k))
    outside = ~ball_mask(GRID, k)
    assert all(np.all(f.coeffs[:, outside] == 0) for f in t.slots)
    full = rhs(s.map(lambda f: SpectralField(GRID, f.coeffs * ~outside)), PhysicalParams())
    for a, b in zip(t.slots, full.slots):
        assert np.abs(a.coeffs - b.coeffs * ~outside).max() < 1e-13


def test_rejects_divergent_state():
    s = random_state(GRID, 9)
    phi = scalar_from_physical(GRID, np.sin(GRID.coordinates()[0]))
    bad = NsmState(0.0, s.v_minus + gradient(GRID, phi), s.v_plus, s.E, s.B)
    with pytest.raises(RejectedStateError):
        rhs(bad, PhysicalParams())
    rhs(bad, PhysicalParams(), check=False)
    with pytest.raises(ValueError):
        rhs(s, PhysicalParams(), Formulation(BULK_CURRENT))


def test_parameter_validation():
    with pytest.raises(ValueError):
        PhysicalParams(n=0)
    with pytest.raises(ValueError):
        PhysicalParams(alpha=-1)
    with pytest.raises(ValueError):
        PhysicalParams(Z=1.5)
    with pytest.raises(ValueError):
        Formulation("weird")
    with pytest.raises(ValueError):
        Formulation(TRUNCATED)
    assert PhysicalParams().is_unit() and not PhysicalParams(e=2).is_unit()
    assert Formulation().tag == PHYSICAL
    assert PhysicalParams.names()[-1] == "alpha"
