"""Uniform grids on [0, 1], trapezoid quadrature, and the one-sided integral
operators that generate the spline reproducing kernel.

Functions are represented by their values on a shared uniform grid.  All
integrals are composite-trapezoid quadrature, which is exact for piecewise
linear integrands and keeps every operator a plain matrix/vector expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import GridMismatchError, InvalidInputError

__all__ = [
    "Grid",
    "GridFunction",
    "integrate",
    "inner",
    "t0_pow",
    "t1_pow",
    "fourier_basis",
    "t0_pow_values",
    "t1_pow_values",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, 1] with trapezoid quadrature weights."""

    points: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise InvalidInputError("grid needs at least 3 points on [0, 1]")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise InvalidInputError("grid must span [0, 1] inclusive")
        h = 1.0 / (pts.size - 1)
        if np.max(np.abs(np.diff(pts) - h)) > 1e-12:
            raise InvalidInputError("grid spacing is not uniform")
        w = np.full(pts.size, h)
        w[0] = w[-1] = h / 2.0
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def n_points(self) -> int:
        return self.points.size

    @property
    def spacing(self) -> float:
        return 1.0 / (self.points.size - 1)

    def __eq__(self, other):
        return isinstance(other, Grid) and self.points.size == other.points.size

    def __hash__(self):
        return hash(self.points.size)


@lru_cache(maxsize=32)
def _uniform_grid(p: int) -> Grid:
    return Grid(np.linspace(0.0, 1.0, p))


def make_grid(p: int = 201) -> Grid:
    """Uniform grid with ``p`` points; instances are cached by size."""
    if p < 3:
        raise InvalidInputError("grid needs at least 3 points")
    return _uniform_grid(int(p))


@dataclass(frozen=True)
class GridFunction:
    """A real function on [0, 1] sampled on a uniform grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise InvalidInputError(
                f"expected {self.grid.n_points} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("grid function values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


def _check_same_grid(f: GridFunction, g: GridFunction):
    if f.grid != g.grid:
        raise GridMismatchError("grid functions live on different grids")


def integrate(f: GridFunction) -> float:
    """Trapezoid-rule integral of ``f`` over [0, 1]."""
    return float(f.grid.weights @ f.values)


def inner(f: GridFunction, g: GridFunction) -> float:
    """L2 inner product of two functions on the same grid."""
    _check_same_grid(f, g)
    return float(f.grid.weights @ (f.values * g.values))


def t0_pow_values(values: np.ndarray, k: int, spacing: float) -> np.ndarray:
    """k-fold cumulative integral from 0, acting on the trailing axis.

    Realizes the Volterra operator with kernel (t-s)_+^{k-1}/(k-1)! by k
    passes of cumulative trapezoid integration.
    """
    if k < 1:
        raise InvalidInputError("operator power k must be >= 1")
    out = np.asarray(values, dtype=float)
    for _ in range(int(k)):
        out = cumulative_trapezoid(out, dx=spacing, axis=-1, initial=0.0)
    return out


def t1_pow_values(values: np.ndarray, k: int, spacing: float) -> np.ndarray:
    """k-fold cumulative integral toward 1 (reflected kernel (s-t)_+^{k-1})."""
    flipped = np.flip(np.asarray(values, dtype=float), axis=-1)
    return np.flip(t0_pow_values(flipped, k, spacing), axis=-1)


def t0_pow(f: GridFunction, k: int) -> GridFunction:
    """Apply the k-th power of the integral-from-zero operator."""
    return GridFunction(f.grid, t0_pow_values(f.values, k, f.grid.spacing))


def t1_pow(f: GridFunction, k: int) -> GridFunction:
    """Apply the k-th power of the integral-to-one operator (adjoint of t0_pow)."""
    return GridFunction(f.grid, t1_pow_values(f.values, k, f.grid.spacing))


def fourier_basis(k: int, grid: Grid) -> GridFunction:
    """Cosine Fourier basis: constant 1 for k=1, sqrt(2)cos((k-1)*pi*t) after."""
    if k < 1:
        raise InvalidInputError("basis index must be >= 1")
    t = grid.points
    if k == 1:
        vals = np.ones_like(t)
    else:
        vals = np.sqrt(2.0) * np.cos((k - 1) * np.pi * t)
    return GridFunction(grid, vals)
