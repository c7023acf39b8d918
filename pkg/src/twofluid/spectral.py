"""Periodic grids, spectral vector fields and Fourier-multiplier operators.

Fields are stored as full complex FFT coefficients, shape ``(3, N, ..., N)``,
normalized so that the physical L2 norm over the box equals the l2 norm of
the coefficient array (no extra factors). Two-dimensional grids still carry
three vector components; the fields are simply constant in x3.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.fft as sfft

ADVECTION = "advection"
CROSS = "cross"


class GridMismatchError(ValueError):
    """Operands live on different grids."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the box [0, L)^d."""

    d: int
    N: int
    L: float = 2 * np.pi

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.d}")
        if self.N < 8 or self.N % 2:
            raise ValueError(f"N must be even and >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"period L must be positive, got {self.L}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(range(1, self.d + 1))

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def volume(self) -> float:
        return self.L**self.d

    @cached_property
    def _int_modes(self) -> np.ndarray:
        # integer labels -N/2+1 .. N/2 (Nyquist carried as +N/2)
        m = np.fft.fftfreq(self.N, 1.0 / self.N)
        m[self.N // 2] = self.N // 2
        return m

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """True wavevectors, shape (d, N, ..., N)."""
        k1 = self._int_modes * (2 * np.pi / self.L)
        return np.stack(np.meshgrid(*([k1] * self.d), indexing="ij"))

    @cached_property
    def kvec(self) -> np.ndarray:
        """Derivative symbol, shape (3, N, ..., N).

        The Nyquist entry is zeroed so that ``i k`` maps real fields to real
        fields; the third row vanishes in two dimensions.
        """
        k = self.wavenumbers.copy()
        nyq = [slice(None)] * (self.d + 1)
        for ax in range(self.d):
            idx = list(nyq)
            idx[0] = ax
            idx[ax + 1] = self.N // 2
            k[tuple(idx)] = 0.0
        if self.d == 2:
            k = np.concatenate([k, np.zeros((1,) + self.shape)])
        return k

    @cached_property
    def k2(self) -> np.ndarray:
        return np.sum(self.kvec**2, axis=0)

    @cached_property
    def kmag(self) -> np.ndarray:
        """|k| of the true wavevector (Nyquist included)."""
        return np.sqrt(np.sum(self.wavenumbers**2, axis=0))

    @cached_property
    def k2_inv(self) -> np.ndarray:
        out = np.zeros(self.shape)
        nz = self.k2 > 0
        out[nz] = 1.0 / self.k2[nz]
        return out

    @property
    def dealias_cutoff(self) -> int:
        """Largest retained integer mode per axis under the 2/3 rule."""
        return (self.N - 1) // 3

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        K = self.dealias_cutoff
        keep = np.abs(self._int_modes) <= K
        mask = keep
        for _ in range(self.d - 1):
            mask = np.multiply.outer(mask, keep)
        return mask

    @property
    def k_max_grid(self) -> float:
        """Largest |k| present on the grid."""
        return float(self.kmag.max())

    def coordinates(self) -> np.ndarray:
        x1 = np.arange(self.N) * self.dx
        return np.stack(np.meshgrid(*([x1] * self.d), indexing="ij"))

    # Half-spectrum (last axis 0..N/2) views used by the time-stepping kernels.

    @property
    def half_size(self) -> int:
        return self.N // 2 + 1

    def half(self, arr: np.ndarray) -> np.ndarray:
        return arr[..., : self.half_size]

    @cached_property
    def kvec_h(self) -> np.ndarray:
        return np.ascontiguousarray(self.half(self.kvec))

    @cached_property
    def k2_h(self) -> np.ndarray:
        return np.ascontiguousarray(self.half(self.k2))

    @cached_property
    def k2_inv_h(self) -> np.ndarray:
        return np.ascontiguousarray(self.half(self.k2_inv))

    @cached_property
    def dealias_h(self) -> np.ndarray:
        return np.ascontiguousarray(self.half(self.dealias_mask))

    @cached_property
    def _synthesis_mask(self) -> np.ndarray:
        """Dealiasing mask with the inverse-transform normalization folded in."""
        return self.dealias_h / np.sqrt(self.volume)

    @cached_property
    def _analysis_mask(self) -> np.ndarray:
        return self.dealias_h * np.sqrt(self.volume)

    @cached_property
    def _reverse_index(self) -> np.ndarray:
        return (-np.arange(self.N)) % self.N

    def extend(self, half: np.ndarray) -> np.ndarray:
        """Full coefficient array from its half spectrum via c(-k) = conj(c(k))."""
        h = self.half_size
        full = np.empty(half.shape[:-1] + (self.N,), dtype=complex)
        full[..., :h] = half
        tail = half[..., self.N // 2 - 1 : 0 : -1]
        for ax in range(half.ndim - self.d, half.ndim - 1):
            tail = np.take(tail, self._reverse_index, axis=ax)
        full[..., h:] = np.conj(tail)
        return full

    def forward_half(self, values: np.ndarray) -> np.ndarray:
        axes = tuple(range(values.ndim - self.d, values.ndim))
        out = sfft.rfftn(values, axes=axes, norm="forward")
        out *= np.sqrt(self.volume)
        return out

    def inverse_half(self, half: np.ndarray) -> np.ndarray:
        axes = tuple(range(half.ndim - self.d, half.ndim))
        out = sfft.irfftn(half, s=self.shape, axes=axes, norm="forward")
        out /= np.sqrt(self.volume)
        return out

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Physical samples -> normalized full coefficients over the trailing d axes."""
        return self.extend(self.forward_half(values))

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Normalized coefficients -> real physical samples (Hermitian part only)."""
        return self.inverse_half(self.half(coeffs))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """A real R^3-valued periodic field held by its Fourier coefficients."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (3,) + self.grid.shape:
            raise ValueError(
                f"coefficients must have shape {(3,) + self.grid.shape}, got {self.coeffs.shape}"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros((3,) + grid.shape, dtype=complex))

    @classmethod
    def from_physical(cls, grid: Grid, values: np.ndarray) -> SpectralField:
        values = np.asarray(values, dtype=float)
        if values.shape != (3,) + grid.shape:
            raise ValueError(f"expected samples of shape {(3,) + grid.shape}, got {values.shape}")
        return cls(grid, grid.forward(values))

    @classmethod
    def from_function(cls, grid: Grid, func) -> SpectralField:
        """Sample ``func(x) -> (f1, f2, f3)`` on the grid nodes."""
        x = grid.coordinates()
        comps = [np.broadcast_to(np.asarray(c, dtype=float), grid.shape) for c in func(x)]
        return cls.from_physical(grid, np.stack(comps))

    def to_physical(self) -> np.ndarray:
        return self.grid.inverse(self.coeffs)

    def _check(self, other: SpectralField) -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"incompatible grids: {self.grid} vs {other.grid}")

    def __add__(self, other: SpectralField) -> SpectralField:
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self) -> SpectralField:
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar: float) -> SpectralField:
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def inner(self, other: SpectralField) -> float:
        """L2 inner product over the box."""
        self._check(other)
        return float(np.vdot(self.coeffs, other.coeffs).real)

    def norm(self) -> float:
        """L2 norm over the box (Parseval)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def max_amplitude(self) -> float:
        return float(np.abs(self.coeffs).max())

    def realness_defect(self) -> float:
        """Max imaginary part of the inverse transform over max amplitude."""
        axes = self.grid.axes
        raw = sfft.ifftn(self.coeffs, axes=axes, norm="forward")
        amp = np.abs(raw).max()
        return float(np.abs(raw.imag).max() / amp) if amp > 0 else 0.0


def leray_project(f: SpectralField) -> SpectralField:
    """Project onto divergence-free fields; the mean mode is left untouched."""
    k = f.grid.kvec
    kdotf = np.einsum("i...,i...->...", k, f.coeffs)
    return SpectralField(f.grid, f.coeffs - k * (kdotf * f.grid.k2_inv))


def curl(f: SpectralField) -> SpectralField:
    k = f.grid.kvec
    c = f.coeffs
    out = 1j * np.stack(
        [
            k[1] * c[2] - k[2] * c[1],
            k[2] * c[0] - k[0] * c[2],
            k[0] * c[1] - k[1] * c[0],
        ]
    )
    return SpectralField(f.grid, out)


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, -f.grid.k2 * f.coeffs)


def gradient(grid: Grid, s: np.ndarray) -> SpectralField:
    """Gradient of a scalar given by its coefficients, shape ``grid.shape``."""
    return SpectralField(grid, 1j * grid.kvec * s)


def divergence(f: SpectralField) -> np.ndarray:
    """Scalar divergence coefficients."""
    return 1j * np.einsum("i...,i...->...", f.grid.kvec, f.coeffs)


def scalar_from_physical(grid: Grid, values: np.ndarray) -> np.ndarray:
    return grid.forward(np.asarray(values, dtype=float))


def ball_mask(grid: Grid, k_max: float) -> np.ndarray:
    """Closed ball |k| <= k_max."""
    return grid.kmag <= k_max * (1 + 1e-12)


def cutoff(f: SpectralField, k_max: float) -> SpectralField:
    """Zero every mode with |k| > k_max (the closed ball is kept)."""
    if not k_max > 0:
        raise ValueError(f"k_max must be positive, got {k_max}")
    return SpectralField(f.grid, f.coeffs * ball_mask(f.grid, k_max))


def dealias(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, f.coeffs * f.grid.dealias_mask)


def project_half(grid: Grid, c: np.ndarray) -> np.ndarray:
    """Leray projection of half-spectrum coefficients; the component axis precedes the grid axes."""
    k = grid.kvec_h
    div = np.sum(k * c, axis=-(grid.d + 1), keepdims=True)
    return c - k * (div * grid.k2_inv_h)


def curl_half(grid: Grid, c: np.ndarray) -> np.ndarray:
    """Curl of half-spectrum coefficients; the component axis precedes the grid axes."""
    k0, k1, k2 = 1j * grid.kvec_h
    tail = (slice(None),) * grid.d
    c0, c1, c2 = (c[(Ellipsis, i) + tail] for i in range(3))
    out = np.empty_like(c)
    o = [out[(Ellipsis, i) + tail] for i in range(3)]
    if grid.d == 2:
        np.multiply(k1, c2, out=o[0])
        np.multiply(-k0, c2, out=o[1])
    else:
        np.multiply(k1, c2, out=o[0])
        o[0] -= k2 * c1
        np.multiply(k2, c0, out=o[1])
        o[1] -= k0 * c2
    np.multiply(k0, c1, out=o[2])
    o[2] -= k1 * c0
    return out


def dealiased_products(
    grid: Grid,
    fields: dict[str, np.ndarray],
    advections: Sequence[tuple[str, str]] = (),
    crosses: Sequence[tuple[str, str]] = (),
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Batch of dealiased quadratic products sharing one set of transforms.

    ``fields`` maps names to half-spectrum coefficient arrays. ``advections``
    lists pairs ``(a, b)`` meaning ``(a . grad) b``; ``crosses`` pairs meaning
    ``a x b``. Returns half-spectrum products in input order.
    """
    d = grid.d
    mask = grid._synthesis_mask
    value_names = sorted({a for a, _ in advections} | {n for pair in crosses for n in pair})
    grad_names = sorted({b for _, b in advections})
    n_blocks = 3 * len(value_names) + 3 * d * len(grad_names)
    if n_blocks == 0:
        return [], []
    k = grid.kvec_h
    buf = np.empty((n_blocks,) + mask.shape, dtype=complex)
    i = 0
    for n in value_names:
        np.multiply(fields[n], mask, out=buf[i : i + 3])
        i += 3
    for n in grad_names:
        grad = fields[n][:, None] * (1j * k[None, :d] * mask)
        buf[i : i + 3 * d] = grad.reshape((3 * d,) + mask.shape)
        i += 3 * d
    axes = tuple(range(-d, 0))
    phys = sfft.irfftn(buf, s=grid.shape, axes=axes, norm="forward", overwrite_x=True)
    values = {n: phys[3 * m : 3 * m + 3] for m, n in enumerate(value_names)}
    off = 3 * len(value_names)
    grads = {
        n: phys[off + 3 * d * m : off + 3 * d * (m + 1)].reshape((3, d) + grid.shape)
        for m, n in enumerate(grad_names)
    }
    prods = np.empty((len(advections) + len(crosses), 3) + grid.shape)
    p = 0
    for a, b in advections:
        u, g = values[a], grads[b]
        np.multiply(u[0], g[:, 0], out=prods[p])
        for j in range(1, d):
            prods[p] += u[j] * g[:, j]
        p += 1
    for a, b in crosses:
        u, w = values[a], values[b]
        prods[p, 0] = u[1] * w[2] - u[2] * w[1]
        prods[p, 1] = u[2] * w[0] - u[0] * w[2]
        prods[p, 2] = u[0] * w[1] - u[1] * w[0]
        p += 1
    out = sfft.rfftn(prods, axes=axes, norm="forward")
    out *= grid._analysis_mask
    na = len(advections)
    return list(out[:na]), list(out[na:])


def pointwise_product(f: SpectralField, g: SpectralField, rule: str) -> SpectralField:
    """Dealiased quadratic product: ``(f . grad) g`` or ``f x g``.

    Both operands are dealiased before the product is formed in physical
    space and the result is dealiased again, so on band-limited input the
    retained modes are free of aliasing.
    """
    f._check(g)
    grid = f.grid
    fields = {"f": grid.half(f.coeffs), "g": grid.half(g.coeffs)}
    if rule == ADVECTION:
        (out,), _ = dealiased_products(f.grid, fields, advections=[("f", "g")])
    elif rule == CROSS:
        _, (out,) = dealiased_products(f.grid, fields, crosses=[("f", "g")])
    else:
        raise ValueError(f"unknown product rule {rule!r}")
    return SpectralField(grid, grid.extend(out))


def random_field(
    grid: Grid,
    rng: np.random.Generator,
    k_band: float | None = None,
    envelope: float = -2.0,
    solenoidal: bool = True,
    zero_mean: bool = True,
) -> SpectralField:
    """Gaussian random real field with amplitude envelope ``|k|**envelope``.

    Modes beyond ``k_band`` (default: the dealiased range) are zeroed.
    """
    white = grid.forward(rng.standard_normal((3,) + grid.shape))
    kmag = grid.kmag
    env = np.zeros(grid.shape)
    nz = kmag > 0
    env[nz] = kmag[nz] ** envelope
    if not zero_mean:
        env[~nz] = 1.0
    keep = grid.dealias_mask if k_band is None else ball_mask(grid, k_band) & grid.dealias_mask
    f = SpectralField(grid, white * env * keep)
    if solenoidal:
        f = leray_project(f)
    return f
