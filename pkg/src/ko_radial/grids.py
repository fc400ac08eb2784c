"""Radial grids and the quadrature kernels everything else is built from.

All cumulative tables in the package come out of `cumulative_integral`
(composite trapezoid) so that they stay consistent with each other on
uniform and graded grids alike.  `nested_radial_integral` is the
r |-> int_0^r y^(1-N) int_0^y t^(N-1) g(t) dt dy
operator that both the successive-approximation solver and the growth
functionals are made of.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionTooSmall, NonPositiveRadius, TooFewNodes

__all__ = [
    "Uniform",
    "Geometric",
    "Grading",
    "RadialGrid",
    "SampledFn",
    "make_grid",
    "cumulative_integral",
    "nested_radial_integral",
    "running_max",
]

#: Default number of cells for grids built from configs.
DEFAULT_GRID_POINTS = 2048

_MIN_CELLS = 16


@dataclass(frozen=True)
class Uniform:
    """Equal spacing h = r_max / m."""


@dataclass(frozen=True)
class Geometric:
    """Cell widths grow by a constant factor ``ratio`` in (1, 1.2]."""

    ratio: float


Grading = Union[Uniform, Geometric]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing radii 0 = r_0 < r_1 < ... < r_M = r_max.

    Instances are immutable; the node array is marked read-only.
    """

    nodes: np.ndarray
    grading: Grading = field(default_factory=Uniform)

    def __post_init__(self):
        object.__setattr__(self, "nodes", _freeze(self.nodes))
        n = self.nodes
        if n.ndim != 1 or n.size < _MIN_CELLS + 1:
            raise TooFewNodes(f"need at least {_MIN_CELLS} cells, got {n.size - 1}")
        if n[0] != 0.0:
            raise ValueError("first node must be exactly 0")
        if not np.all(np.diff(n) > 0.0):
            raise ValueError("nodes must be strictly increasing")

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    def same_nodes(self, other: "RadialGrid") -> bool:
        return np.array_equal(self.nodes, other.nodes)

    def __len__(self) -> int:
        return self.nodes.size


@dataclass(frozen=True, eq=False)
class SampledFn:
    """A function known by its values at the nodes of a grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.shape != self.grid.nodes.shape:
            raise ValueError("values and grid nodes differ in length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sampled values must be finite at every node")

    def at_end(self) -> float:
        return float(self.values[-1])


def make_grid(r_max: float, m: int, grading: Grading | None = None) -> RadialGrid:
    """Build a grid on [0, r_max] with m cells.

    Uniform grading spaces nodes at h = r_max/m.  Geometric grading makes
    cell widths grow by ``ratio`` each cell, which clusters nodes near the
    origin: node_j = r_max * (q^j - 1) / (q^m - 1).
    """
    if not (r_max > 0.0) or not np.isfinite(r_max):
        raise NonPositiveRadius(f"r_max must be positive and finite, got {r_max}")
    if m < _MIN_CELLS:
        raise TooFewNodes(f"need at least {_MIN_CELLS} cells, got {m}")
    if grading is None:
        grading = Uniform()
    if isinstance(grading, Uniform):
        nodes = np.linspace(0.0, r_max, m + 1)
    elif isinstance(grading, Geometric):
        q = grading.ratio
        if not (1.0 < q <= 1.2):
            raise ValueError(f"geometric ratio must lie in (1, 1.2], got {q}")
        j = np.arange(m + 1, dtype=float)
        nodes = r_max * np.expm1(j * np.log(q)) / np.expm1(m * np.log(q))
        nodes[0] = 0.0
        nodes[-1] = r_max
    else:
        raise TypeError(f"unknown grading {grading!r}")
    return RadialGrid(nodes, grading)


def _cumtrapz(r: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Composite trapezoid antiderivative with F(r_0) = 0."""
    out = np.empty_like(v)
    out[0] = 0.0
    np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(r), out=out[1:])
    return out


def cumulative_integral(f: SampledFn) -> SampledFn:
    """F(r_k) = int_0^{r_k} f(t) dt by composite trapezoid.

    Exact for piecewise-linear integrands; nondecreasing whenever f >= 0.
    """
    return SampledFn(f.grid, _cumtrapz(f.grid.nodes, f.values))


def _nested_radial(r: np.ndarray, g: np.ndarray, n_dim: int) -> np.ndarray:
    """Raw-array core of nested_radial_integral (also used by the solver)."""
    if n_dim < 3:
        raise DimensionTooSmall(f"n_dim must be >= 3, got {n_dim}")
    inner = _cumtrapz(r, r ** (n_dim - 1) * g)
    outer = np.empty_like(inner)
    # y^(1-N) * inner(y) -> 0 as y -> 0 (inner is O(y^N)); take the limit.
    outer[0] = 0.0
    outer[1:] = r[1:] ** (1 - n_dim) * inner[1:]
    return _cumtrapz(r, outer)


def nested_radial_integral(g: SampledFn, n_dim: int) -> SampledFn:
    """r |-> int_0^r y^(1-N) int_0^y t^(N-1) g(t) dt dy on g's grid.

    For g >= 0 the result is nonnegative, nondecreasing and vanishes at 0.
    """
    return SampledFn(g.grid, _nested_radial(g.grid.nodes, g.values, n_dim))


def _collapsed_radial(r: np.ndarray, g: np.ndarray, n_dim: int) -> np.ndarray:
    """Same double integral as _nested_radial, via its Fubini-collapsed form.

    (N-2) * result(r) = int_0^r s g ds - r^(2-N) int_0^r s^(N-1) g ds.
    Feeding the inner trapezoid error through the y^(1-N) kernel picks up
    an O(h^2 log h) term; collapsing first keeps the error a clean O(h^2),
    which the solver's refinement contract needs.  Node weights stay
    nonnegative, so monotonicity in g is preserved.
    """
    if n_dim < 3:
        raise DimensionTooSmall(f"n_dim must be >= 3, got {n_dim}")
    c_lin = _cumtrapz(r, r * g)
    c_pow = _cumtrapz(r, r ** (n_dim - 1) * g)
    out = np.zeros_like(r)
    out[1:] = (c_lin[1:] - r[1:] ** (2 - n_dim) * c_pow[1:]) / (n_dim - 2)
    return out


def running_max(f: SampledFn) -> SampledFn:
    """result(r_k) = max of f over nodes up to and including r_k."""
    return SampledFn(f.grid, np.maximum.accumulate(f.values))
