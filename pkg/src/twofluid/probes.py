"""Finite-sample ratio studies for the linear and bilinear estimates.

Each probe evaluates both sides of an inequality over a seeded corpus and
reports LHS/RHS ratios. Estimates with an unspecified constant are observed
(finite, refinement-stable maxima); only the Maxwell bound carries an explicit
constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .integrator import lawson_rk4
from .lp import block_index, block_space_time_norm, chemin_lerner_norm, decompose, sobolev_norm
from .spectral import Grid, SpectralField, curl_half, leray_project, project_half, random_field

PRODUCT_SOBOLEV = "product-sobolev"
PRODUCT_GRADIENT_2D = "product-gradient-2d"
ADVECTION_ENERGY = "advection-energy"
ADVECTION_L43 = "advection-l43"
LORENTZ = "lorentz"
LORENTZ_CURRENT = "lorentz-current"
HEAT = "heat"
MAXWELL = "maxwell"
MAXWELL_ENERGY = "maxwell-energy"

STATIC_TAGS = (PRODUCT_SOBOLEV, PRODUCT_GRADIENT_2D)
SPACE_TIME_TAGS = (ADVECTION_ENERGY, ADVECTION_L43, LORENTZ, LORENTZ_CURRENT)
PRODUCT_TAGS = STATIC_TAGS + SPACE_TIME_TAGS
ALL_TAGS = PRODUCT_TAGS + (HEAT, MAXWELL, MAXWELL_ENERGY)

RHS_FLOOR = 1e-12


class DegenerateCorpusError(ValueError):
    """Every sample had a vanishing right-hand side."""


@dataclass
class RatioStudy:
    tag: str
    lhs: np.ndarray
    rhs: np.ndarray
    corpus: dict
    discarded: int = 0

    @classmethod
    def from_samples(cls, tag: str, lhs, rhs, corpus: dict, floor: float = RHS_FLOOR) -> RatioStudy:
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        keep = rhs >= floor
        if not keep.any():
            raise DegenerateCorpusError(f"{tag}: all {len(rhs)} samples have RHS below {floor}")
        return cls(tag, lhs[keep], rhs[keep], corpus, int((~keep).sum()))

    @property
    def ratios(self) -> np.ndarray:
        return self.lhs / self.rhs

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def median_ratio(self) -> float:
        return float(np.median(self.ratios))

    def rows(self) -> list[dict]:
        return [
            {"tag": self.tag, "sample": i, "lhs": a, "rhs": b, "ratio": a / b}
            for i, (a, b) in enumerate(zip(self.lhs.tolist(), self.rhs.tolist()))
        ]


# ---------------------------------------------------------------- corpora


@dataclass
class FieldCorpus:
    """Pairs of seeded random solenoidal fields with a |k|^envelope spectrum."""

    grid: Grid
    pairs: list[tuple[SpectralField, SpectralField]]
    descriptor: dict = field(default_factory=dict)


def make_corpus(
    grid: Grid, count: int, seed: int = 0, k_band: float | None = None, envelope: float = -2.0
) -> FieldCorpus:
    """``count`` independent pairs, band-limited to ``k_band`` (default N/4)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    band = grid.N / 4 if k_band is None else k_band
    rng = np.random.default_rng(seed)
    pairs = [
        (random_field(grid, rng, k_band=band, envelope=envelope), random_field(grid, rng, k_band=band, envelope=envelope))
        for _ in range(count)
    ]
    desc = {"family": "gaussian-solenoidal", "d": grid.d, "N": grid.N, "count": count,
            "seed": seed, "k_band": band, "envelope": envelope}
    return FieldCorpus(grid, pairs, desc)


# ------------------------------------------------------- exact products


def _embed(f: SpectralField, big: Grid) -> SpectralField:
    """Same trigonometric polynomial on a finer grid."""
    g = f.grid
    idx = np.fft.fftfreq(g.N, 1.0 / g.N).astype(int) % big.N
    out = np.zeros((3,) + big.shape, dtype=complex)
    out[(slice(None),) + np.ix_(*([idx] * g.d))] = f.coeffs
    return SpectralField(big, out)


def _padded(grid: Grid) -> Grid:
    return Grid(grid.d, 2 * grid.N, grid.L)


def _scalar_field(grid: Grid, values: np.ndarray) -> SpectralField:
    z = np.zeros_like(values)
    return SpectralField.from_physical(grid, np.stack([values, z, z]))


def dot_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """u . v without aliasing (scalar carried in the first component)."""
    big = _padded(u.grid)
    a, b = _embed(u, big).to_physical(), _embed(v, big).to_physical()
    return _scalar_field(big, np.sum(a * b, axis=0))


def advection_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """(u . grad) v without aliasing."""
    big = _padded(u.grid)
    a = _embed(u, big).to_physical()
    vb = _embed(v, big)
    out = np.zeros((3,) + big.shape)
    for j in range(big.d):
        dv = SpectralField(big, 1j * big.kvec[j] * vb.coeffs).to_physical()
        out += a[j] * dv
    return SpectralField.from_physical(big, out)


def cross_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """u x v without aliasing."""
    big = _padded(u.grid)
    return SpectralField.from_physical(big, np.cross(_embed(u, big).to_physical(), _embed(v, big).to_physical(), axis=0))


def without_mean(f: SpectralField) -> SpectralField:
    c = f.coeffs.copy()
    c[(slice(None),) + (0,) * f.grid.d] = 0
    return SpectralField(f.grid, c)


# ----------------------------------------------------- product probes


def decay(f: SpectralField, t: float, rate: float) -> SpectralField:
    """exp(rate t Laplacian) f."""
    return SpectralField(f.grid, f.coeffs * np.exp(-rate * t * f.grid.k2))


def _hs(f: SpectralField, s: float) -> float:
    return sobolev_norm(f, s, homogeneous=True)


def _static_sample(tag: str, u: SpectralField, v: SpectralField, s: float) -> tuple[float, float]:
    d = u.grid.d
    if tag == PRODUCT_SOBOLEV:
        lhs = _hs(without_mean(dot_product(u, v)), s - d / 2)
        return lhs, sobolev_norm(u, s) * v.norm()
    lhs = sobolev_norm(advection_product(u, v), s - 1)
    rhs = u.norm() * sobolev_norm(v, 1.0) + sobolev_norm(u, 1.0) * _hs(v, 1.0)
    return lhs, rhs


def _l2_time(values: list[float], dt: float) -> float:
    return math.sqrt(dt * sum(x * x for x in values))


def _space_time_sample(tag: str, u0, v0, horizon: float, n_times: int, rate: float) -> tuple[float, float]:
    dt = horizon / n_times
    us = [decay(u0, i * dt, rate) for i in range(n_times)]
    vs = [decay(v0, i * dt, rate) for i in range(n_times)]
    sup_half = max(_hs(u, 0.5) for u in us)
    u_32 = _l2_time([_hs(u, 1.5) for u in us], dt)
    if tag == ADVECTION_ENERGY:
        lhs = _l2_time([_hs(advection_product(u, v), -0.5) for u, v in zip(us, vs)], dt)
        return lhs, sup_half * _l2_time([_hs(v, 1.5) for v in vs], dt)
    if tag == ADVECTION_L43:
        series = [decompose(advection_product(u, v)) for u, v in zip(us, vs)]
        lhs = chemin_lerner_norm(series, dt, 0.0, 4.0 / 3.0, homogeneous=False)
        return lhs, math.sqrt(sup_half * u_32) * _l2_time([_hs(v, 1.5) for v in vs], dt)
    sup_b = max(v.norm() for v in vs)
    lhs = _l2_time([_hs(without_mean(cross_product(u, v)), -0.5) for u, v in zip(us, vs)], dt)
    if tag == LORENTZ:
        return lhs, _l2_time([_hs(u, 1.0) for u in us], dt) * sup_b
    return lhs, horizon**0.25 * math.sqrt(sup_half * u_32) * sup_b


def probe_product_estimate(
    tag: str,
    corpus: FieldCorpus,
    s: float = 0.5,
    horizon: float = 1.0,
    n_times: int = 16,
    decay_rate: float = 0.1,
) -> RatioStudy:
    """Ratio study of one bilinear estimate over ``corpus``.

    Static tags use the pairs directly; space-time tags evolve each pair by
    ``exp(decay_rate t Laplacian)`` on ``[0, horizon)`` sampled at ``n_times``
    left endpoints (the second field of a pair plays B for the Lorentz tags).
    Products are formed on a doubled grid so they are exact. Negative
    homogeneous norms are taken after removing the mean of the product.
    """
    if tag not in PRODUCT_TAGS:
        raise ValueError(f"unknown product tag {tag!r}; expected one of {PRODUCT_TAGS}")
    d = corpus.grid.d
    if tag == PRODUCT_GRADIENT_2D and d != 2:
        raise ValueError(f"{tag} is a two-dimensional estimate")
    if tag in SPACE_TIME_TAGS and d != 3:
        raise ValueError(f"{tag} is a three-dimensional estimate")
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    lhs, rhs = [], []
    for u, v in corpus.pairs:
        if tag in STATIC_TAGS:
            a, b = _static_sample(tag, u, v, s)
        else:
            a, b = _space_time_sample(tag, u, v, horizon, n_times, decay_rate)
        lhs.append(a)
        rhs.append(b)
    desc = dict(corpus.descriptor, s=s)
    if tag in SPACE_TIME_TAGS:
        desc.update(horizon=horizon, n_times=n_times, decay_rate=decay_rate)
    return RatioStudy.from_samples(tag, lhs, rhs, desc)


# --------------------------------------------------------- heat probe


@dataclass(frozen=True)
class HeatSample:
    """Initial datum and forcing ``f(t) = exp(-forcing_decay t) f``."""

    u0: SpectralField
    f: SpectralField
    forcing_decay: float = 0.0


def heat_corpus(grid: Grid, count: int, seed: int = 0, k_band: float | None = None) -> list[HeatSample]:
    """Random data with forcing amplitudes spread log-uniformly over 1e-2..1e2."""
    band = grid.N / 4 if k_band is None else k_band
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        u0 = random_field(grid, rng, k_band=band)
        f = random_field(grid, rng, k_band=band)
        scale = 10 ** rng.uniform(-2, 2) * u0.norm() / max(f.norm(), 1e-300)
        out.append(HeatSample(u0, scale * f, float(rng.uniform(0, 2))))
    return out


def _phi(x: np.ndarray) -> np.ndarray:
    """(1 - exp(-x)) / x with the removable singularity filled."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = np.abs(x) > 1e-12
    out[nz] = -np.expm1(-x[nz]) / x[nz]
    return out


def heat_mode_factors(lam: np.ndarray, beta: float, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(A, D) with u_hat(t) = A u0_hat + D f_hat for u' = -lam u + exp(-beta t) f."""
    t = np.asarray(t, dtype=float)[:, None]
    lam = np.asarray(lam, dtype=float)[None, :]
    A = np.exp(-lam * t)
    D = np.exp(-beta * t) * t * _phi((lam - beta) * t)
    return A, D


def _block_table(labels: np.ndarray, power: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Per-time block L2 norms from per-mode powers ``power[t, mode]``."""
    q0 = labels.min()
    table = np.stack([np.bincount(labels - q0, weights=row) for row in power])
    return list(range(q0, q0 + table.shape[1])), np.sqrt(table)


def probe_heat_semigroup(
    corpus: list[HeatSample],
    p: float = math.inf,
    r1: float = 1.0,
    s: float = 0.5,
    mu: float = 1.0,
    a: float = 0.0,
    horizon: float = 1.0,
    n_times: int = 400,
) -> RatioStudy:
    """Parabolic regularization ratio for u' + a u - mu Lap u = P f, solved mode by mode.

    LHS is max(sup_t |u|_{hom H^s}, |u|_{L~^p hom H^{s+2/p}}); RHS is
    mu^{-1/p}|u0|_{hom H^s} + mu^{-1-1/p+1/r1}|f|_{L~^{r1} hom H^{s-2+2/r1}}.
    Time norms use ``n_times`` left-endpoint samples on ``[0, horizon)``.
    """
    if r1 < 1 or p < r1:
        raise ValueError(f"need p >= r1 >= 1, got p = {p}, r1 = {r1}")
    if not mu > 0 or a < 0:
        raise ValueError("need mu > 0 and a >= 0")
    if not corpus:
        raise ValueError("empty corpus")
    grid = corpus[0].u0.grid
    nz = grid.kmag > 0
    kmag = grid.kmag[nz]
    labels = block_index(grid)[nz]
    lam = a + mu * kmag**2
    dt = horizon / n_times
    times = dt * np.arange(n_times)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    lhs, rhs = [], []
    for sample in corpus:
        u0 = sample.u0.coeffs[:, nz]
        f = leray_project(sample.f).coeffs[:, nz]
        A, D = heat_mode_factors(lam, sample.forcing_decay, times)
        p0 = np.sum(np.abs(u0) ** 2, axis=0)
        pf = np.sum(np.abs(f) ** 2, axis=0)
        cross = np.sum(np.real(np.conj(u0) * f), axis=0)
        power = A**2 * p0 + 2 * A * D * cross + D**2 * pf
        sup_part = math.sqrt(np.max(power @ kmag ** (2 * s)))
        qs, table = _block_table(labels, power)
        cl_part = block_space_time_norm(qs, table, dt, s + 2 * inv_p, p)
        _, f_table = _block_table(labels, np.exp(-2 * sample.forcing_decay * times)[:, None] * pf[None, :])
        f_norm = block_space_time_norm(qs, f_table, dt, s - 2 + 2 / r1, r1)
        u0_norm = math.sqrt(float(p0 @ kmag ** (2 * s)))
        lhs.append(max(sup_part, cl_part))
        rhs.append(mu ** (-inv_p) * u0_norm + mu ** (-1 - inv_p + 1 / r1) * f_norm)
    desc = {"family": "heat-duhamel", "d": grid.d, "N": grid.N, "count": len(corpus),
            "p": p, "r1": r1, "s": s, "mu": mu, "a": a, "horizon": horizon, "n_times": n_times}
    return RatioStudy.from_samples(HEAT, lhs, rhs, desc)


def friction_spread(corpus: list[HeatSample], a_values=(0.0, 1.0, 10.0), **kwargs) -> tuple[list[RatioStudy], float]:
    """Heat studies at each friction value and the relative spread of their max ratios."""
    studies = [probe_heat_semigroup(corpus, a=a, **kwargs) for a in a_values]
    m = [st.max_ratio for st in studies]
    return studies, (max(m) - min(m)) / max(m)


# ------------------------------------------------------- Maxwell probe


@dataclass(frozen=True)
class MaxwellSample:
    """Data and forcing ``cos(omega t) f`` on the E equation."""

    E0: SpectralField
    B0: SpectralField
    f: SpectralField
    omega: float = 0.0


def maxwell_corpus(grid: Grid, count: int = 20, seed: int = 0, k_band: float | None = None) -> list[MaxwellSample]:
    """Random solenoidal data with forcing amplitudes log-uniform in 0.1..10 and omega in [0, 5]."""
    band = grid.N / 4 if k_band is None else k_band
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        E0 = random_field(grid, rng, k_band=band)
        B0 = random_field(grid, rng, k_band=band)
        f = random_field(grid, rng, k_band=band)
        f = (10 ** rng.uniform(-1, 1) * E0.norm() / max(f.norm(), 1e-300)) * f
        out.append(MaxwellSample(E0, B0, f, float(rng.uniform(0, 5))))
    return out


def forced_maxwell(sample: MaxwellSample, horizon: float, dt: float):
    """Integrate E' = curl B + cos(omega t) f, B' = -curl E; yields (t, E_half, B_half)."""
    grid = sample.E0.grid
    f = project_half(grid, grid.half(sample.f.coeffs))

    def tangent(y, t):
        out = np.empty_like(y)
        out[0] = curl_half(grid, y[1]) + math.cos(sample.omega * t) * f
        out[1] = -curl_half(grid, y[0])
        return out

    y = np.stack([grid.half(sample.E0.coeffs), grid.half(sample.B0.coeffs)])
    n = int(round(horizon / dt))
    yield 0.0, y[0], y[1]
    for i in range(n):
        y = lawson_rk4(y, dt, tangent, t=i * dt)
        yield (i + 1) * dt, y[0], y[1]


def _half_hs_norm(grid: Grid, c: np.ndarray, s: float) -> float:
    """Inhomogeneous H^s norm from half-spectrum coefficients."""
    w = np.full(grid.half_size, 2.0)
    w[0] = 1.0
    if grid.N % 2 == 0:
        w[-1] = 1.0
    weight = (1.0 + grid.half(grid.kmag) ** 2) ** s * w
    return math.sqrt(float(np.sum(weight * np.abs(c) ** 2)))


def forcing_l1_norm(sample: MaxwellSample, horizon: float, s: float = 0.0) -> float:
    """|f|_{L1_T H^s} for the cos-modulated forcing, by adaptive quadrature."""
    amp = sobolev_norm(leray_project(sample.f), s)
    val, _ = quad(lambda t: abs(math.cos(sample.omega * t)), 0.0, horizon, limit=200)
    return amp * val


def probe_maxwell_bound(
    corpus: list[MaxwellSample],
    s: float = 0.0,
    horizon: float = 1.0,
    dt: float = 1e-3,
    energy_form: bool = False,
) -> RatioStudy:
    """Forced Maxwell bound with constant 1.

    The default compares sup|E|_{H^s} + sup|B|_{H^s} with
    |E0|_{H^s} + |B0|_{H^s} + |f|_{L1_T H^s}. With ``energy_form`` the left side
    is sup sqrt(|E|^2 + |B|^2) and the data term sqrt(|E0|^2 + |B0|^2).
    """
    lhs, rhs = [], []
    for sample in corpus:
        grid = sample.E0.grid
        sup_e = sup_b = sup_eb = 0.0
        for _, E, B in forced_maxwell(sample, horizon, dt):
            ne, nb = _half_hs_norm(grid, E, s), _half_hs_norm(grid, B, s)
            sup_e, sup_b = max(sup_e, ne), max(sup_b, nb)
            sup_eb = max(sup_eb, math.hypot(ne, nb))
        e0, b0 = sobolev_norm(sample.E0, s), sobolev_norm(sample.B0, s)
        forcing = forcing_l1_norm(sample, horizon, s)
        if energy_form:
            lhs.append(sup_eb)
            rhs.append(math.hypot(e0, b0) + forcing)
        else:
            lhs.append(sup_e + sup_b)
            rhs.append(e0 + b0 + forcing)
    grid = corpus[0].E0.grid if corpus else None
    desc = {"family": "forced-maxwell", "d": getattr(grid, "d", None), "N": getattr(grid, "N", None),
            "count": len(corpus), "s": s, "horizon": horizon, "dt": dt}
    return RatioStudy.from_samples(MAXWELL_ENERGY if energy_form else MAXWELL, lhs, rhs, desc)
