"""Uniform 1-D grids, scalar fields, quadrature, and discretized space-time white noise.

The spatial domain is a symmetric truncation [-L, L] of the real line.  Profiles
of interest decay exponentially toward the boundary, so truncation error sits
well below the finite-difference scheme error for the default half widths.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n_cells + 1 nodes on [-half_width, half_width]."""

    half_width: float
    n_cells: int

    def __post_init__(self) -> None:
        if self.half_width <= 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.n_cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_nodes)

    def meta(self) -> dict:
        return {"half_width": self.half_width, "n_cells": self.n_cells, "dx": self.dx}


def grid_for_eps(eps: float, half_width: float = 6.0, cells_per_layer: int = 16) -> Grid1D:
    """Grid resolving the O(sqrt(eps)) interface layer with >= cells_per_layer cells.

    Default rule dx <= sqrt(eps)/8 puts 16 cells across one layer width.
    """
    dx_target = np.sqrt(eps) / (cells_per_layer / 2.0)
    n = int(np.ceil(2.0 * half_width / dx_target))
    if n % 2:
        n += 1
    return Grid1D(half_width, n)


@dataclass
class Field:
    """Scalar nodal values on a Grid1D."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid with {self.grid.n_nodes} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def zero_field(grid: Grid1D) -> Field:
    return Field(grid, np.zeros(grid.n_nodes))


def constant_field(grid: Grid1D, value: float) -> Field:
    return Field(grid, np.full(grid.n_nodes, float(value)))


def _quad_weights(grid: Grid1D) -> np.ndarray:
    w = np.full(grid.n_nodes, grid.dx)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def inner(a: Field | np.ndarray, b: Field | np.ndarray, grid: Grid1D | None = None) -> float:
    """Trapezoid L2 inner product of two nodal value sets."""
    if isinstance(a, Field):
        grid = a.grid
        a = a.values
    if isinstance(b, Field):
        grid = grid or b.grid
        b = b.values
    if grid is None:
        raise ValueError("grid required when passing raw arrays")
    return float(np.dot(_quad_weights(grid), np.asarray(a) * np.asarray(b)))


def l2_norm(f: Field) -> float:
    """Trapezoid-rule L2 norm: exact for constants, O(dx^2) in general."""
    return float(np.sqrt(inner(f, f)))


def gradient(f: Field) -> Field:
    """Central differences inside, second-order one-sided at the boundary."""
    v = f.values
    dx = f.grid.dx
    g = np.empty_like(v)
    g[1:-1] = (v[2:] - v[:-2]) / (2.0 * dx)
    g[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx)
    g[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dx)
    return Field(f.grid, g)


def second_difference(f: Field) -> Field:
    """Standard three-point second difference; one-sided copies at the boundary."""
    v = f.values
    dx2 = f.grid.dx ** 2
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dx2
    d[0] = d[1]
    d[-1] = d[-2]
    return Field(f.grid, d)


def h1_norm(f: Field) -> float:
    """Sum-of-norms Sobolev norm ||f|| + ||grad f||."""
    return l2_norm(f) + l2_norm(gradient(f))


def sup_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


@dataclass(frozen=True)
class RngStream:
    """Seeded, splittable noise source; identical (seed, stream) gives identical draws."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=np.uint64([self.seed & 0xFFFFFFFFFFFFFFFF, self.stream]))
        )

    def child(self, stream: int) -> "RngStream":
        return RngStream(self.seed, stream)


def sample_white_noise_increment(
    grid: Grid1D, dt: float, rng: RngStream | np.random.Generator
) -> Field:
    """Cell-averaged increments of space-time white noise over one step of length dt.

    Each node carries an independent centered Gaussian with variance dt/dx,
    the consistent piecewise-constant discretization of a delta-correlated field.
    """
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if dt == 0:
        return zero_field(grid)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    scale = np.sqrt(dt / grid.dx)
    return Field(grid, scale * gen.standard_normal(grid.n_nodes))
