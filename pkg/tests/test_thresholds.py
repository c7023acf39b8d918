import itertools
import math

import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from twofluid.dynamics import PhysicalParams
from twofluid.spectral import Grid
from twofluid.thresholds import (
    LARGE_C,
    SMALL_C,
    DataNorms,
    classify,
    compute_constants,
    smallness_threshold,
    threshold_report,
)

positive = st.floats(0.1, 10.0)


def brute_force_constants(p: PhysicalParams, c: float):
    """Independent listing of every min/max candidate."""
    n, mm, mp, e, Z, eps0, mu0, num, nup, alpha = (
        p.n, p.m_minus, p.m_plus, p.e, p.Z, p.eps0, p.mu0, p.nu_minus, p.nu_plus, p.alpha)
    lam1 = min(n * mm / (2 * eps0), n * mp / (2 * eps0), 0.5, 1 / (2 * eps0 * mu0),
               num / eps0, nup / eps0, alpha / eps0)
    lam2 = max(n * mm / (2 * eps0), n * mp / (2 * eps0), 0.5, 1 / (2 * eps0 * mu0))
    g = math.sqrt(lam2 / lam1)
    cands = []
    for nm, nu in ((n * mm, num), (n * mp, nup)):
        cands += [
            math.sqrt(nm / nu),
            g * (e / mm) * (nm / nu) ** 0.75,
            g * (e * Z / mp) * (nm / nu) ** 0.75,
            g * alpha / (nu**0.75 * nm**0.25),
            alpha / nu,
            nm / nu,
        ]
    return lam1, lam2, c * max(cands)


def test_unit_parameters():
    assert compute_constants(PhysicalParams()) == (0.5, 0.5, 1.0)
    lam1, lam2, C = compute_constants(PhysicalParams(), c=2.0)
    assert (lam1, lam2, C) == (0.5, 0.5, 2.0)


def test_quadrupled_viscosity():
    p = PhysicalParams(nu_minus=4.0, nu_plus=4.0)
    assert compute_constants(p) == pytest.approx((0.5, 0.5, 0.5))
    assert compute_constants(p) == pytest.approx(brute_force_constants(p, 1.0), rel=1e-15)


@given(positive, positive, positive, st.floats(0.0, 5.0), st.integers(1, 4), positive, positive, positive,
       positive, positive, st.floats(0.1, 5.0))
def test_matches_brute_force(n, mm, mp, e, Z, eps0, mu0, num, nup, alpha, c):
    p = PhysicalParams(n=n, m_minus=mm, m_plus=mp, e=e, Z=Z, eps0=eps0, mu0=mu0,
                       nu_minus=num, nu_plus=nup, alpha=alpha)
    got = compute_constants(p, c)
    want = brute_force_constants(p, c)
    assert got == pytest.approx(want, rel=1e-14)


def test_no_friction_means_no_threshold():
    lam1, _, C = compute_constants(PhysicalParams(alpha=0.0))
    assert lam1 == 0 and C == math.inf
    assert smallness_threshold(C) == 0
    rep = classify((lam1, 0.5, C), DataNorms(0.0, 0.0, 0.0))
    assert rep.satisfied and rep.t_star is None


def test_classify_unit_case():
    rep = classify(compute_constants(PhysicalParams()), DataNorms(0.1, 0.09, 0.1))
    assert rep.case == LARGE_C and rep.threshold == pytest.approx(1 / 8)
    assert rep.satisfied and rep.bound == pytest.approx((1 - 0.1) / 4)
    zero = classify(compute_constants(PhysicalParams()), DataNorms(0.0, 0.0, 0.0))
    assert zero.satisfied and zero.bound == pytest.approx(1 / 4) and zero.t_star == math.inf
    big = classify(compute_constants(PhysicalParams()), DataNorms(0.2, 0.2, 0.2))
    assert not big.satisfied


def test_classify_small_constant_case():
    rep = classify(compute_constants(PhysicalParams(), c=0.1), DataNorms(0.5, 0.5, 0.5), c=0.1)
    assert rep.C == pytest.approx(0.1) and rep.case == SMALL_C
    assert rep.threshold == pytest.approx(min((1 - 0.4) / 0.1, 1.0)) == 1.0
    assert rep.bound == 1.0 and rep.satisfied
    C, c0 = 0.1, 0.5
    assert rep.t_star == pytest.approx(((1 - C * c0 - 2 * C) / (3 * C * c0)) ** (4 / 3))
    assert smallness_threshold(0.2) == pytest.approx(1.0)
    assert smallness_threshold(0.24) == pytest.approx((1 - 0.96) / 0.24)


@given(st.floats(0.01, 5), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_classify_monotone_in_data(c, a, b, extra):
    constants = compute_constants(PhysicalParams(), c)
    small = classify(constants, DataNorms(a, a, b), c)
    large = classify(constants, DataNorms(a + extra, a + extra, b + extra), c)
    assert not (large.satisfied and not small.satisfied)


def test_report_from_state():
    grid = Grid(3, 8)
    s = random_state(grid, 0, scale=1e-3)
    rep = threshold_report(s, PhysicalParams())
    assert rep.data_norm >= rep.data_norm_homogeneous
    assert rep.c0 <= rep.data_norm
    d = rep.as_dict()
    assert set(d) >= {"lambda1", "lambda2", "C", "case", "threshold", "satisfied", "bound", "t_star"}
    with pytest.raises(ValueError):
        compute_constants(PhysicalParams(), c=0.0)


def test_every_entry_can_bind():
    """Each of the twelve candidates is the maximum for some parameter choice."""
    hits = set()
    grid_vals = [0.1, 1.0, 10.0]
    for n, mm, e, nu, alpha in itertools.product(grid_vals, grid_vals, [0.0, 1.0, 10.0], grid_vals, grid_vals):
        p = PhysicalParams(n=n, m_minus=mm, e=e, nu_minus=nu, alpha=alpha)
        lam1, lam2, C = compute_constants(p)
        assert C == pytest.approx(brute_force_constants(p, 1.0)[2], rel=1e-14)
        hits.add(round(C, 12))
    assert len(hits) > 10
