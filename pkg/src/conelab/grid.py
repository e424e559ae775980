"""Uniform periodic grids with trigonometric calculus.

Fields are real samples on x_j = j L / n.  Differentiation, inversion of the
smoothing operator (1 - alpha^2 d_xx), off-grid evaluation and quadrature all
act through the real FFT, so they are exact (to rounding) on trigonometric
polynomials the grid resolves.  Nonlinear terms elsewhere in the package go
through :func:`dealiased_product`, which drops the top third of the spectrum.
Quadratic products of fields living under that cutoff are then alias-free,
which is what lets chain-rule manipulations of the discrete equations cancel
to rounding error instead of to truncation error.

A small 2D tensor-product grid is included for cross-checking identities that
are stated on a genuine two-dimensional domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid1D",
    "PeriodicField",
    "deriv",
    "helmholtz",
    "helmholtz_inv",
    "interp",
    "integrate",
    "dealias",
    "dealiased_product",
    "l2_norm",
    "random_band_limited",
    "Grid2D",
    "Field2D",
    "deriv2",
    "dealiased_product2",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid of n points on a circle of circumference ``length``.

    n is restricted to powers of two; that keeps the transforms fast and is
    what every consumer in this package uses.
    """

    n: int
    length: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        if self.n < 8 or not _is_power_of_two(self.n):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"circumference must be positive and finite, got {self.length}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * (self.length / self.n)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers of the rfft layout, 2 pi k / L for k = 0 .. n/2."""
        return (2.0 * np.pi / self.length) * np.arange(self.n // 2 + 1)

    @cached_property
    def dealias_keep(self) -> np.ndarray:
        """Boolean mask of rfft modes kept by the two-thirds rule."""
        return np.arange(self.n // 2 + 1) <= self.n // 3

    def field(self, values: np.ndarray) -> "PeriodicField":
        return PeriodicField(self, values)

    def from_function(self, fn) -> "PeriodicField":
        return PeriodicField(self, fn(self.x))

    def constant(self, value: float) -> "PeriodicField":
        return PeriodicField(self, np.full(self.n, float(value)))


@dataclass(frozen=True)
class PeriodicField:
    """Real periodic field sampled on a :class:`Grid1D`.

    Construction validates shape and finiteness, so a NaN or Inf produced by
    an unstable run surfaces as a ValueError at the first wrapping point.
    Addition, subtraction and scalar multiplication are provided; pointwise
    products are deliberately not, to keep aliasing decisions explicit.
    """

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", arr)

    def _same_grid(self, other: "PeriodicField") -> None:
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "PeriodicField") -> "PeriodicField":
        self._same_grid(other)
        return PeriodicField(self.grid, self.values + other.values)

    def __sub__(self, other: "PeriodicField") -> "PeriodicField":
        self._same_grid(other)
        return PeriodicField(self.grid, self.values - other.values)

    def __neg__(self) -> "PeriodicField":
        return PeriodicField(self.grid, -self.values)

    def __mul__(self, scalar: float) -> "PeriodicField":
        if isinstance(scalar, PeriodicField):
            return NotImplemented
        return PeriodicField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


def _spectrum(f: PeriodicField) -> np.ndarray:
    return np.fft.rfft(f.values)


def _to_field(grid: Grid1D, spec: np.ndarray) -> PeriodicField:
    return PeriodicField(grid, np.fft.irfft(spec, n=grid.n))


def deriv(f: PeriodicField, order: int = 1) -> PeriodicField:
    """Spectral derivative of the given order (1, 2 or 3).

    Odd orders zero the Nyquist mode, the usual symmetric convention for real
    data.  Higher orders are rejected rather than silently amplifying the
    tail of the spectrum.
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= 3:
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    spec = _spectrum(f) * (1j * f.grid.wavenumbers) ** order
    if order % 2 == 1:
        spec[-1] = 0.0
    return _to_field(f.grid, spec)


def helmholtz(f: PeriodicField, alpha: float) -> PeriodicField:
    """Apply (1 - alpha^2 d_xx), the momentum map of the smoothing kernel."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    spec = _spectrum(f) * (1.0 + (alpha * f.grid.wavenumbers) ** 2)
    return _to_field(f.grid, spec)


def helmholtz_inv(f: PeriodicField, alpha: float) -> PeriodicField:
    """Invert (1 - alpha^2 d_xx); exact on the grid for every alpha >= 0."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    spec = _spectrum(f) / (1.0 + (alpha * f.grid.wavenumbers) ** 2)
    return _to_field(f.grid, spec)


def interp(f: PeriodicField, points) -> np.ndarray:
    """Evaluate the trigonometric interpolant of f at arbitrary points.

    Agrees with ``f.values`` at grid nodes and with the underlying function
    to spectral accuracy for resolved data.  Points are taken modulo the
    circumference implicitly (the interpolant is periodic).  Evaluation is a
    Horner recurrence in z = exp(2 pi i x / L), so the cost is n/2 vector
    operations per call rather than a dense exponential matrix.
    """
    pts = np.asarray(points, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise ValueError("evaluation points must be finite")
    spec = _spectrum(f).copy()
    spec[-1] *= 0.5  # Nyquist split evenly between +k and -k
    z = np.exp((2j * np.pi / f.grid.length) * pts)
    acc = np.zeros_like(z)
    for c in spec[:0:-1]:
        acc = (acc + c) * z
    return (spec[0].real + 2.0 * acc.real) / f.grid.n


def integrate(f: PeriodicField) -> float:
    """Periodic quadrature L/n * sum, exact for resolved trigonometric data."""
    return float(f.values.mean() * f.grid.length)


def dealias(f: PeriodicField) -> PeriodicField:
    """Zero every mode above the two-thirds cutoff."""
    spec = _spectrum(f)
    spec[~f.grid.dealias_keep] = 0.0
    return _to_field(f.grid, spec)


def dealiased_product(f: PeriodicField, g: PeriodicField) -> PeriodicField:
    """Pointwise product followed by the two-thirds filter.

    For factors already under the cutoff the result equals the filtered true
    product: the aliased images of the discarded tail land entirely outside
    the kept band.  That exactness is relied on by the residual evaluators.
    """
    f._same_grid(g)
    spec = np.fft.rfft(f.values * g.values)
    spec[~f.grid.dealias_keep] = 0.0
    return _to_field(f.grid, spec)


def l2_norm(f: PeriodicField) -> float:
    return float(np.sqrt(np.mean(f.values**2) * f.grid.length))


def random_band_limited(
    grid: Grid1D,
    rng: np.random.Generator,
    max_mode: int = 10,
    amplitude: float = 1.0,
    decay: float = 0.25,
) -> PeriodicField:
    """Random real field supported on modes 1..max_mode with decaying weights."""
    if max_mode < 1 or max_mode > grid.n // 3:
        raise ValueError("max_mode must fit under the dealiasing cutoff")
    spec = np.zeros(grid.n // 2 + 1, dtype=complex)
    k = np.arange(1, max_mode + 1)
    weights = amplitude * np.exp(-decay * k)
    spec[1 : max_mode + 1] = weights * (
        rng.standard_normal(max_mode) + 1j * rng.standard_normal(max_mode)
    )
    # rfft normalization: unit coefficient ~ amplitude 2/n
    return _to_field(grid, spec * (grid.n / 2.0))


# --- minimal 2D tensor grid -------------------------------------------------


@dataclass(frozen=True)
class Grid2D:
    """Doubly periodic tensor grid; axis 0 is x, axis 1 is y."""

    nx: int
    ny: int
    lx: float = 2.0 * np.pi
    ly: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        for n in (self.nx, self.ny):
            if n < 8 or not _is_power_of_two(n):
                raise ValueError(f"grid sizes must be powers of two >= 8, got {n}")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("circumferences must be positive")

    @cached_property
    def kx(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.lx / self.nx)

    @cached_property
    def ky(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.ny, d=self.ly / self.ny)

    @cached_property
    def dealias_keep(self) -> np.ndarray:
        ix = np.abs(np.fft.fftfreq(self.nx, d=1.0 / self.nx)) <= self.nx // 3
        iy = np.abs(np.fft.fftfreq(self.ny, d=1.0 / self.ny)) <= self.ny // 3
        return np.outer(ix, iy)

    def field(self, values: np.ndarray) -> "Field2D":
        return Field2D(self, values)


@dataclass(frozen=True)
class Field2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"expected shape {(self.grid.nx, self.grid.ny)}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", arr)


def deriv2(f: Field2D, axis: int, order: int = 1) -> Field2D:
    """Spectral derivative along one axis of a 2D field."""
    if axis not in (0, 1):
        raise ValueError("axis must be 0 (x) or 1 (y)")
    if not 1 <= order <= 3:
        raise ValueError("derivative order must be 1, 2 or 3")
    k = f.grid.kx if axis == 0 else f.grid.ky
    shape = (-1, 1) if axis == 0 else (1, -1)
    spec = np.fft.fft2(f.values) * (1j * k.reshape(shape)) ** order
    if order % 2 == 1:
        # zero the Nyquist plane of the differentiated axis
        nyq = (f.grid.nx if axis == 0 else f.grid.ny) // 2
        if axis == 0:
            spec[nyq, :] = 0.0
        else:
            spec[:, nyq] = 0.0
    return Field2D(f.grid, np.fft.ifft2(spec).real)


def dealiased_product2(f: Field2D, g: Field2D) -> Field2D:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    spec = np.fft.fft2(f.values * g.values)
    spec[~f.grid.dealias_keep] = 0.0
    return Field2D(f.grid, np.fft.ifft2(spec).real)
