"""Dyadic decomposition and the Sobolev / Chemin-Lerner norms.

Blocks use sharp shells on the lattice: block ``q`` holds the modes with
``2**(q-1) < |k| <= 2**q``. The shells are disjoint, so the blocks add up to
the field exactly. The zero mode belongs to no homogeneous block and is
attached to the lowest block for inhomogeneous norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectral import Grid, SpectralField

TIME_EXPONENTS = (1.0, 4.0 / 3.0, 2.0, math.inf)


class UndefinedNormError(ValueError):
    """Homogeneous norm of negative order requested for a field with a mean."""


def _weights(kmag: np.ndarray, s: float, homogeneous: bool) -> np.ndarray:
    if homogeneous:
        w = np.zeros_like(kmag)
        nz = kmag > 0
        w[nz] = kmag[nz] ** (2 * s)
        return w
    return (1.0 + kmag**2) ** s


def sobolev_norm(f: SpectralField, s: float, homogeneous: bool = False) -> float:
    """H^s (weight (1+|k|^2)^s) or homogeneous H^s (weight |k|^(2s)) norm."""
    power = np.sum(np.abs(f.coeffs) ** 2, axis=0)
    if homogeneous and s < 0:
        mean = power[(0,) * f.grid.d]
        if mean > 1e-28 * max(power.sum(), 1e-300):
            raise UndefinedNormError(
                f"homogeneous norm of order {s} undefined for a field with nonzero mean"
            )
    if homogeneous and s == 0:
        return float(np.sqrt(power.sum()))
    return float(np.sqrt(np.sum(_weights(f.grid.kmag, s, homogeneous) * power)))


def block_index(grid: Grid) -> np.ndarray:
    """Block label per mode: ceil(log2|k|); the zero mode gets the lowest label."""
    kmag = grid.kmag
    q = np.zeros(grid.shape, dtype=int)
    nz = kmag > 0
    # guard against log2 landing a hair above an integer power of two
    q[nz] = np.ceil(np.log2(kmag[nz]) - 1e-12).astype(int)
    q[~nz] = q[nz].min()
    return q


@dataclass
class DyadicBlocks:
    """Dyadic shells of one field, with per-block L2 energies."""

    field: SpectralField
    labels: np.ndarray = field(repr=False)
    energies: dict[int, float]
    mean_energy: float

    @property
    def indices(self) -> list[int]:
        return sorted(self.energies)

    def nonempty(self, tol: float = 0.0) -> list[int]:
        return [q for q in self.indices if self.energies[q] > tol]

    def block(self, q: int) -> SpectralField:
        """Delta_q f (homogeneous; the zero mode is excluded)."""
        sel = (self.labels == q) & (self.field.grid.kmag > 0)
        return SpectralField(self.field.grid, self.field.coeffs * sel)

    def low_part(self, q: int) -> SpectralField:
        """S_q f: sum of blocks with index <= q-1 (zero mode excluded)."""
        sel = (self.labels <= q - 1) & (self.field.grid.kmag > 0)
        return SpectralField(self.field.grid, self.field.coeffs * sel)

    def block_norms(self, homogeneous: bool = True) -> dict[int, float]:
        out = dict(self.energies)
        if not homogeneous:
            lowest = min(out) if out else int(self.labels.min())
            out[lowest] = out.get(lowest, 0.0) + self.mean_energy
        return {q: math.sqrt(e) for q, e in out.items()}


def decompose(f: SpectralField) -> DyadicBlocks:
    grid = f.grid
    labels = block_index(grid)
    power = np.sum(np.abs(f.coeffs) ** 2, axis=0)
    nz = grid.kmag > 0
    qs = labels[nz]
    sums = np.bincount(qs - qs.min(), weights=power[nz])
    energies = {int(q + qs.min()): float(e) for q, e in enumerate(sums)}
    mean_energy = float(power[~nz].sum())
    return DyadicBlocks(f, labels, energies, mean_energy)


def _time_norm(samples: np.ndarray, dt: float, r: float) -> np.ndarray:
    """Left-endpoint L^r_T norm along axis 0."""
    if r < 1:
        raise ValueError(f"time exponent must be >= 1, got {r}")
    if math.isinf(r):
        return samples.max(axis=0)
    return (dt * np.sum(samples**r, axis=0)) ** (1.0 / r)


def _check_r(r: float) -> None:
    if not any(math.isclose(r, x) or (math.isinf(r) and math.isinf(x)) for x in TIME_EXPONENTS):
        raise ValueError(f"time exponent must be one of 1, 4/3, 2, inf; got {r}")


def _block_table(series: Sequence[DyadicBlocks], homogeneous: bool) -> tuple[list[int], np.ndarray]:
    norms = [b.block_norms(homogeneous) for b in series]
    qs = sorted(set().union(*norms))
    table = np.array([[n.get(q, 0.0) for q in qs] for n in norms])
    return qs, table


def chemin_lerner_norm(
    series: Sequence[DyadicBlocks],
    dt: float,
    s: float,
    r: float,
    homogeneous: bool = True,
) -> float:
    """l2 over q of the weighted time-L^r norm of each block.

    ``series`` holds one decomposition per sample at uniform spacing ``dt``;
    the horizon is ``len(series) * dt`` (left-endpoint rule).
    Weights are ``2**(q s)`` (homogeneous) or ``(1 + 2**q)**s``.
    """
    if len(series) == 0:
        raise ValueError("empty series")
    _check_r(r)
    qs, table = _block_table(series, homogeneous)
    return block_space_time_norm(qs, table, dt, s, r, homogeneous)


def block_space_time_norm(
    qs: Sequence[int], table: np.ndarray, dt: float, s: float, r: float, homogeneous: bool = True
) -> float:
    """Weighted l2 over blocks of the time-L^r norms of ``table[t, block]``.

    ``table`` holds per-block L2 norms sampled at spacing ``dt``; any
    ``r >= 1`` is accepted.
    """
    qa = np.asarray(qs, dtype=float)
    weight = 2.0 ** (qa * s) if homogeneous else (1.0 + 2.0**qa) ** s
    per_block = _time_norm(np.asarray(table, dtype=float), dt, r)
    return float(np.sqrt(np.sum((weight * per_block) ** 2)))


def time_norm(values: Sequence[float], dt: float, r: float) -> float:
    """L^r_T of a sampled scalar norm history (left-endpoint rule)."""
    if len(values) == 0:
        raise ValueError("empty series")
    return float(_time_norm(np.asarray(values, dtype=float), dt, r))


def xv_norm(fields: Sequence[SpectralField], dt: float) -> float:
    """max(L^inf_T hom-H^{1/2}, L^2_T hom-H^{3/2}) over a uniformly sampled trajectory."""
    if len(fields) == 0:
        raise ValueError("empty series")
    half = [sobolev_norm(f, 0.5, homogeneous=True) for f in fields]
    three_half = [sobolev_norm(f, 1.5, homogeneous=True) for f in fields]
    return max(time_norm(half, dt, math.inf), time_norm(three_half, dt, 2.0))


@dataclass
class NormSeries:
    """Append-only time series of one norm (descriptor kept for reporting)."""

    s: float
    homogeneous: bool
    r: float = math.inf
    times: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def append(self, t: float, value: float) -> None:
        if self.times and not t > self.times[-1]:
            raise ValueError(f"timestamps must increase: {t} after {self.times[-1]}")
        if value < 0:
            raise ValueError(f"norm values are nonnegative, got {value}")
        self.times.append(float(t))
        self.values.append(float(value))

    def time_norm(self, dt: float) -> float:
        return time_norm(self.values, dt, self.r)
