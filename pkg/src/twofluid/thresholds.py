"""Small-data global existence constants and threshold classification (3D)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .dynamics import NsmState, PhysicalParams
from .lp import sobolev_norm

SMALL_C = "4C<1"
LARGE_C = "4C>=1"


def weight_entries(params: PhysicalParams) -> tuple[list[float], list[float]]:
    """The seven quantities minimized for lambda_1 and the four maximized for lambda_2."""
    p = params
    energy = [
        p.n * p.m_minus / (2 * p.eps0),
        p.n * p.m_plus / (2 * p.eps0),
        0.5,
        1.0 / (2 * p.eps0 * p.mu0),
    ]
    dissipation = [p.nu_minus / p.eps0, p.nu_plus / p.eps0, p.alpha / p.eps0]
    return energy + dissipation, energy


def _div(a: float, b: float) -> float:
    if b > 0:
        return a / b
    return 0.0 if a == 0 else math.inf


def constant_entries(params: PhysicalParams, lambda1: float, lambda2: float) -> list[float]:
    """The six expressions entering C, for the minus then the plus species (12 values).

    Zero denominators give ``inf`` unless the numerator vanishes too.
    """
    p = params
    root = math.sqrt(_div(lambda2, lambda1))
    out = []
    for nm, nu in ((p.n * p.m_minus, p.nu_minus), (p.n * p.m_plus, p.nu_plus)):
        r = _div(nm, nu)
        scale = 0.0 if r == 0 else root * r**0.75
        out += [
            math.sqrt(r),
            0.0 if p.e == 0 else scale * p.e / p.m_minus,
            0.0 if p.e == 0 else scale * p.e * p.Z / p.m_plus,
            0.0 if p.alpha == 0 else root * _div(p.alpha, nu**0.75 * nm**0.25),
            _div(p.alpha, nu),
            r,
        ]
    return out


def compute_constants(params: PhysicalParams, c: float = 1.0) -> tuple[float, float, float]:
    """(lambda_1, lambda_2, C) for the universal factor ``c``.

    With no friction (alpha = 0) lambda_1 vanishes and C is infinite, so no
    data qualifies as small.
    """
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    mins, maxs = weight_entries(params)
    lam1, lam2 = min(mins), max(maxs)
    return lam1, lam2, c * max(constant_entries(params, lam1, lam2))


@dataclass(frozen=True)
class DataNorms:
    """Initial-data sizes entering the threshold test."""

    combined: float  # |v-|_{H^1/2} + |v+|_{H^1/2} + |E|_L2 + |B|_L2
    combined_homogeneous: float  # same with hom-H^{1/2} velocities
    c0: float  # L2 sum of all four fields


def initial_data_norms(state: NsmState) -> DataNorms:
    vm, vp, E, B = state.slots
    fields_l2 = E.norm() + B.norm()
    return DataNorms(
        combined=sobolev_norm(vm, 0.5) + sobolev_norm(vp, 0.5) + fields_l2,
        combined_homogeneous=sobolev_norm(vm, 0.5, True) + sobolev_norm(vp, 0.5, True) + fields_l2,
        c0=vm.norm() + vp.norm() + fields_l2,
    )


@dataclass(frozen=True)
class ThresholdReport:
    lambda1: float
    lambda2: float
    C: float
    c: float
    case: str
    threshold: float
    data_norm: float
    data_norm_homogeneous: float
    c0: float
    satisfied: bool
    bound: float
    t_star: float | None

    def as_dict(self) -> dict:
        return asdict(self)


def smallness_threshold(C: float) -> float:
    if 4 * C < 1:
        return min((1 - 4 * C) / C, 1.0)
    return 1.0 / (8 * C)


def _power(num: float, den: float) -> float:
    """(num / den) ** (4/3), infinite when the quotient over- or underflows."""
    try:
        return (num / den) ** (4 / 3) if den > 0 else math.inf
    except OverflowError:
        return math.inf


def _t_star(C: float, c0: float) -> float | None:
    """Local existence step, when the data size admits one."""
    if 4 * C < 1:
        if c0 > (1 - 4 * C) / C:
            return None
        return _power(1 - C * c0 - 2 * C, 3 * C * c0)
    if c0 > 1 / (2 * C):
        return None
    return _power((1 - C * c0) ** 2, 24 * C**2 * c0)


def classify(constants: tuple[float, float, float], norms: DataNorms, c: float = 1.0) -> ThresholdReport:
    """Case split, smallness test and predicted X^v bound for the given data sizes."""
    lam1, lam2, C = constants
    small = 4 * C < 1
    threshold = smallness_threshold(C)
    bound = 1.0 if small else (1 - C * norms.c0) / (4 * C)
    return ThresholdReport(
        lambda1=lam1,
        lambda2=lam2,
        C=C,
        c=c,
        case=SMALL_C if small else LARGE_C,
        threshold=threshold,
        data_norm=norms.combined,
        data_norm_homogeneous=norms.combined_homogeneous,
        c0=norms.c0,
        satisfied=norms.combined <= threshold,
        bound=bound,
        t_star=_t_star(C, norms.c0) if math.isfinite(C) else None,
    )


def threshold_report(state: NsmState, params: PhysicalParams, c: float = 1.0) -> ThresholdReport:
    return classify(compute_constants(params, c), initial_data_norms(state), c)
