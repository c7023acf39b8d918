"""Energy audit, a priori norm tracking and constraint residuals.

Inequalities whose constants are unspecified are tracked as ratio series;
nothing here asserts a universal constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dynamics import Formulation, NsmState, PhysicalParams, effective_params, energy_weights
from .lp import sobolev_norm
from .spectral import divergence

SLOT_NAMES = ("v_minus", "v_plus", "E", "B")


@dataclass(frozen=True)
class EnergyReport:
    """Weighted energy summands, accumulated dissipation and the identity residual."""

    t: float
    kinetic_minus: float
    kinetic_plus: float
    electric: float
    magnetic: float
    viscous_minus: float
    viscous_plus: float
    friction: float
    residual: float

    @property
    def total(self) -> float:
        return self.kinetic_minus + self.kinetic_plus + self.electric + self.magnetic

    @property
    def dissipated(self) -> float:
        return self.viscous_minus + self.viscous_plus + self.friction

    def relative_residual(self, initial_total: float) -> float:
        return abs(self.residual) / initial_total if initial_total > 0 else abs(self.residual)


def energy_summands(state: NsmState, params: PhysicalParams) -> tuple[float, float, float, float]:
    """(n m-/2 eps0)|v-|^2, (n m+/2 eps0)|v+|^2, |E|^2/2, |B|^2/(2 eps0 mu0)."""
    w = energy_weights(params)
    return tuple(0.5 * wi * f.inner(f) for wi, f in zip(w, state.slots))


def dissipation_rates(state: NsmState, params: PhysicalParams) -> tuple[float, float, float]:
    """Instantaneous viscous (per species) and friction dissipation rates."""
    p = params
    grad_m = sobolev_norm(state.v_minus, 1.0, homogeneous=True) ** 2
    grad_p = sobolev_norm(state.v_plus, 1.0, homogeneous=True) ** 2
    slip = state.v_minus - state.v_plus
    return (p.nu_minus / p.eps0 * grad_m, p.nu_plus / p.eps0 * grad_p, p.alpha / p.eps0 * slip.inner(slip))


@dataclass
class DissipationAccumulators:
    """Time integrals of the dissipation rates, by the trapezoidal rule."""

    initial_total: float
    viscous_minus: float = 0.0
    viscous_plus: float = 0.0
    friction: float = 0.0
    t: float | None = None
    rates: tuple[float, float, float] | None = None

    def advance(self, t: float, rates: tuple[float, float, float]) -> None:
        if self.t is not None:
            if t <= self.t:
                raise ValueError(f"accumulator time must increase: {t} after {self.t}")
            h = 0.5 * (t - self.t)
            self.viscous_minus += h * (self.rates[0] + rates[0])
            self.viscous_plus += h * (self.rates[1] + rates[1])
            self.friction += h * (self.rates[2] + rates[2])
        self.t = t
        self.rates = tuple(rates)


def energy_report(state: NsmState, params: PhysicalParams, acc: DissipationAccumulators) -> EnergyReport:
    km, kp, el, mg = energy_summands(state, params)
    residual = (km + kp + el + mg) + acc.viscous_minus + acc.viscous_plus + acc.friction - acc.initial_total
    return EnergyReport(state.t, km, kp, el, mg, acc.viscous_minus, acc.viscous_plus, acc.friction, residual)


class EnergyAudit:
    """Step hook that integrates the dissipation and records an EnergyReport per call.

    Register it as a ``run`` hook so the quadrature sees every step.
    """

    def __init__(self, params: PhysicalParams, form: Formulation = Formulation()):
        self.params = effective_params(params, form)
        self.acc: DissipationAccumulators | None = None
        self.reports: list[EnergyReport] = []

    def __call__(self, state: NsmState, step_index: int = 0) -> EnergyReport:
        if self.acc is None:
            self.acc = DissipationAccumulators(sum(energy_summands(state, self.params)))
        self.acc.advance(state.t, dissipation_rates(state, self.params))
        report = energy_report(state, self.params, self.acc)
        self.reports.append(report)
        return report

    @property
    def initial_total(self) -> float:
        if self.acc is None:
            raise ValueError("audit has not seen a state yet")
        return self.acc.initial_total

    @property
    def latest(self) -> EnergyReport:
        return self.reports[-1]

    def max_relative_residual(self) -> float:
        return max(r.relative_residual(self.initial_total) for r in self.reports)

    def inequality_holds(self, rtol: float) -> bool:
        """total + dissipated <= (1 + rtol) * initial total at every recorded time."""
        bound = self.initial_total * (1 + rtol)
        return all(r.total + r.dissipated <= bound for r in self.reports)


def divergence_residual(state) -> dict[str, float]:
    """max |k . f_hat| over the largest coefficient amplitude, per field."""
    out = {}
    for name, f in zip(SLOT_NAMES, state.slots):
        amp = f.max_amplitude()
        out[name] = float(np.abs(divergence(f)).max() / amp) if amp > 0 else 0.0
    return out


def initial_size(state: NsmState) -> float:
    """C0 = |v-|_L2 + |v+|_L2 + |E|_L2 + |B|_L2."""
    return sum(f.norm() for f in state.slots)


def _trapezoid(times: list[float], values: list[float]) -> float:
    if len(times) < 2:
        return 0.0
    return float(np.trapezoid(values, times))


@dataclass
class NormHistory:
    """Norms of the velocities and fields sampled at observer ticks."""

    s1: float = 0.5
    times: list[float] = field(default_factory=list)
    series: dict[str, list[float]] = field(default_factory=dict)

    KEYS = (
        "vm_l2", "vp_l2", "vm_h1", "vp_h1", "E_l2", "B_l2",
        "vm_hs", "vp_hs", "vm_h12", "vp_h12", "vm_h32", "vp_h32",
    )

    def record(self, state: NsmState) -> None:
        if self.times and not state.t > self.times[-1]:
            raise ValueError(f"sample times must increase: {state.t} after {self.times[-1]}")
        vm, vp = state.v_minus, state.v_plus
        values = {
            "vm_l2": vm.norm(),
            "vp_l2": vp.norm(),
            "vm_h1": sobolev_norm(vm, 1.0, homogeneous=True),
            "vp_h1": sobolev_norm(vp, 1.0, homogeneous=True),
            "E_l2": state.E.norm(),
            "B_l2": state.B.norm(),
            "vm_hs": sobolev_norm(vm, self.s1 + 1.0),
            "vp_hs": sobolev_norm(vp, self.s1 + 1.0),
            "vm_h12": sobolev_norm(vm, 0.5, homogeneous=True),
            "vp_h12": sobolev_norm(vp, 0.5, homogeneous=True),
            "vm_h32": sobolev_norm(vm, 1.5, homogeneous=True),
            "vp_h32": sobolev_norm(vp, 1.5, homogeneous=True),
        }
        self.times.append(float(state.t))
        for k in self.KEYS:
            self.series.setdefault(k, []).append(float(values[k]))

    def __len__(self) -> int:
        return len(self.times)

    def sup(self, key: str) -> float:
        return max(self.series[key])

    def integral(self, key: str, power: float = 1.0) -> float:
        return _trapezoid(self.times, [v**power for v in self.series[key]])


def xv_value(history: NormHistory, which: str) -> float:
    """Running max(sup hom-H^{1/2}, L2_t hom-H^{3/2}) for ``which`` in {"vm", "vp"}."""
    return max(history.sup(f"{which}_h12"), math.sqrt(history.integral(f"{which}_h32", 2.0)))


def _ratio(num: float, den: float) -> float:
    if den > 0:
        return num / den
    return 0.0 if num == 0 else math.inf


@dataclass(frozen=True)
class AprioriReport:
    t: float
    vm_sup_l2: float
    vp_sup_l2: float
    vm_l2_h1: float
    vp_l2_h1: float
    E_sup_l2: float
    B_sup_l2: float
    c0: float
    c0_ct: float
    em_ratio: float
    vm_l1_hs: float
    vp_l1_hs: float
    vm_ratio: float
    vp_ratio: float
    xv: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def apriori_report(history: NormHistory, c0: float, T: float | None = None) -> AprioriReport:
    """Tracked norms and their ratios to C0 max(1, T) (fields) and C0 max(1, T)^2 (velocities).

    The universal constant is taken as 1, so the ratios are monitors whose
    boundedness over time is what matters.
    """
    if len(history) == 0:
        raise ValueError("empty norm history")
    T = history.times[-1] if T is None else T
    ct = max(1.0, T)
    em = history.sup("E_l2") + history.sup("B_l2")
    vm_l1 = history.integral("vm_hs")
    vp_l1 = history.integral("vp_hs")
    return AprioriReport(
        t=T,
        vm_sup_l2=history.sup("vm_l2"),
        vp_sup_l2=history.sup("vp_l2"),
        vm_l2_h1=math.sqrt(history.integral("vm_h1", 2.0)),
        vp_l2_h1=math.sqrt(history.integral("vp_h1", 2.0)),
        E_sup_l2=history.sup("E_l2"),
        B_sup_l2=history.sup("B_l2"),
        c0=c0,
        c0_ct=c0 * ct,
        em_ratio=_ratio(em, c0 * ct),
        vm_l1_hs=vm_l1,
        vp_l1_hs=vp_l1,
        vm_ratio=_ratio(vm_l1, c0 * ct**2),
        vp_ratio=_ratio(vp_l1, c0 * ct**2),
        xv=max(xv_value(history, "vm"), xv_value(history, "vp")),
    )


COMMON_COLUMNS = (
    "t", "vm_l2", "vp_l2", "vm_h1", "vp_h1", "E_l2", "B_l2",
    "kinetic_minus", "kinetic_plus", "electric", "magnetic",
    "viscous_minus", "viscous_plus", "friction", "residual",
    "div_v_minus", "div_v_plus", "div_E", "div_B",
)
COLUMNS_3D = COMMON_COLUMNS + ("xv",)
COLUMNS_2D = COMMON_COLUMNS + ("em_ratio", "vm_ratio", "vp_ratio")


def columns(dimension: int) -> tuple[str, ...]:
    return COLUMNS_3D if dimension == 3 else COLUMNS_2D


class RunMonitor:
    """Collects the energy audit, norm history and one CSV row per observer tick.

    ``hook`` must be registered as a per-step hook and ``observe`` as an
    observer of the same run.
    """

    def __init__(self, params: PhysicalParams, form: Formulation, dimension: int, s1: float = 0.5):
        if not 0 < s1 < 1:
            raise ValueError(f"s1 must lie in (0, 1), got {s1}")
        self.audit = EnergyAudit(params, form)
        self.history = NormHistory(s1)
        self.dimension = dimension
        self.columns = columns(dimension)
        self.rows: list[dict[str, float]] = []
        self.c0: float | None = None

    def hook(self, state: NsmState, step_index: int) -> None:
        self.audit(state, step_index)

    def observe(self, state: NsmState, step_index: int) -> None:
        if self.c0 is None:
            self.c0 = initial_size(state)
        self.history.record(state)
        energy = self.audit.latest
        if energy.t != state.t:
            raise RuntimeError("the energy hook must run on every step before observers")
        apriori = apriori_report(self.history, self.c0)
        row = {k: self.history.series[k][-1] for k in ("vm_l2", "vp_l2", "vm_h1", "vp_h1", "E_l2", "B_l2")}
        row["t"] = state.t
        for k in ("kinetic_minus", "kinetic_plus", "electric", "magnetic",
                  "viscous_minus", "viscous_plus", "friction", "residual"):
            row[k] = getattr(energy, k)
        for name, r in divergence_residual(state).items():
            row[f"div_{name}"] = r
        for k in self.columns[len(COMMON_COLUMNS):]:
            row[k] = getattr(apriori, k)
        self.rows.append({k: row[k] for k in self.columns})

    def apriori(self) -> AprioriReport:
        return apriori_report(self.history, self.c0)
