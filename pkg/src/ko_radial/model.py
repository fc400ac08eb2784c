"""Problem data: radial weights, nonlinearities and their growth envelopes.

A problem is two weights p1, p2 (nonnegative, continuous, radial), a pair
of nonlinearities f1, f2 that are nondecreasing in each argument and
positive on the diagonal, and the envelope data (cbar_i, fbar_i) bounding
how f_i grows when one argument is scaled:

    f1(t, t*s) <= cbar1 * f1(t,t) * fbar1(s)
    f2(t*s, t) <= cbar2 * f2(t,t) * fbar2(s)

(the scaled slot is the one the nonlinearity couples through).  These
hypotheses are the user's responsibility; the library only audits them on
a sample lattice and warns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import (
    DimensionTooSmall,
    EmptyLattice,
    NegativeWeightValue,
    NonPositiveExponent,
)
from .grids import RadialGrid, SampledFn

__all__ = [
    "Constant",
    "PowerDecay",
    "Power",
    "Tabulated",
    "WeightFn",
    "NonlinearityPair",
    "ProblemSpec",
    "power_pair",
    "check_c2_envelope",
    "check_c1",
    "eval_weight_on_grid",
    "default_lattice",
    "EnvelopeReport",
    "C1Report",
]


# --------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class Constant:
    """p(r) = c."""

    c: float

    def __post_init__(self):
        if self.c < 0:
            raise NegativeWeightValue(f"constant weight must be >= 0, got {self.c}")

    def __call__(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.c)


@dataclass(frozen=True)
class PowerDecay:
    """p(r) = c * (1 + r)^(-sigma)."""

    c: float
    sigma: float

    def __post_init__(self):
        if self.c < 0:
            raise NegativeWeightValue(f"amplitude must be >= 0, got {self.c}")
        if self.sigma < 0:
            raise ValueError(f"decay exponent must be >= 0, got {self.sigma}")

    def __call__(self, r):
        return self.c * (1.0 + np.asarray(r, dtype=float)) ** (-self.sigma)


@dataclass(frozen=True)
class Power:
    """p(r) = c * r^k with k >= 0 (k < 0 would not be continuous at 0)."""

    c: float
    k: float

    def __post_init__(self):
        if self.c < 0:
            raise NegativeWeightValue(f"amplitude must be >= 0, got {self.c}")
        if self.k < 0:
            raise ValueError(f"power weights need k >= 0, got {self.k}")

    def __call__(self, r):
        return self.c * np.asarray(r, dtype=float) ** self.k


@dataclass(frozen=True)
class Tabulated:
    """Linear interpolation of samples, constant beyond the last node."""

    samples: SampledFn

    def __post_init__(self):
        if np.any(self.samples.values < 0):
            raise NegativeWeightValue("tabulated weight has a negative sample")

    def __call__(self, r):
        return np.interp(
            np.asarray(r, dtype=float), self.samples.grid.nodes, self.samples.values
        )


WeightFn = Union[Constant, PowerDecay, Power, Tabulated]


def eval_weight_on_grid(w: WeightFn, grid: RadialGrid) -> SampledFn:
    """Sample a weight at the grid nodes."""
    vals = np.asarray(w(grid.nodes), dtype=float)
    if np.any(vals < 0):
        raise NegativeWeightValue("weight evaluated negative on the grid")
    return SampledFn(grid, vals)


# --------------------------------------------------------------------------
# nonlinearities


@dataclass(frozen=True)
class NonlinearityPair:
    """f1, f2 with the envelope data (cbar_i, fbar_i).

    ``f1``/``f2`` map (u, v) arrays to nonnegative arrays; ``fbar1``/
    ``fbar2`` are increasing scalar-to-scalar growth envelopes.  ``family``
    is a human-readable tag used in reports and config round-trips.
    """

    f1: Callable
    f2: Callable
    cbar1: float
    fbar1: Callable
    cbar2: float
    fbar2: Callable
    family: str = "custom"

    def diag(self, s):
        """f1(s,s) + f2(s,s), the denominator of the Z integrand."""
        s = np.asarray(s, dtype=float)
        return self.f1(s, s) + self.f2(s, s)


def power_pair(alpha: float, beta: float) -> NonlinearityPair:
    """f1(u,v) = v^alpha, f2(u,v) = u^beta.

    The envelopes are tight: (t*s)^a = t^a * s^a, so cbar = 1 and
    fbar1(s) = s^alpha, fbar2(s) = s^beta give equality.
    """
    if alpha <= 0:
        raise NonPositiveExponent(f"alpha must be > 0, got {alpha}")
    if beta <= 0:
        raise NonPositiveExponent(f"beta must be > 0, got {beta}")
    return NonlinearityPair(
        f1=lambda u, v: np.asarray(v, dtype=float) ** alpha,
        f2=lambda u, v: np.asarray(u, dtype=float) ** beta,
        cbar1=1.0,
        fbar1=lambda s: np.asarray(s, dtype=float) ** alpha,
        cbar2=1.0,
        fbar2=lambda s: np.asarray(s, dtype=float) ** beta,
        family=f"power_pair({alpha:g},{beta:g})",
    )


def default_lattice() -> np.ndarray:
    """81 audit points: t, s on a geometric ladder 2^-4 .. 2^4."""
    g = np.geomspace(2.0**-4, 2.0**4, 9)
    t, s = np.meshgrid(g, g)
    return np.column_stack([t.ravel(), s.ravel()])


_ENVELOPE_SLACK = 1e-12


@dataclass(frozen=True)
class EnvelopeReport:
    holds: bool
    worst_ratio: float


def check_c2_envelope(pair: NonlinearityPair, lattice=None) -> EnvelopeReport:
    """Audit the growth-envelope inequality on a lattice of (t, s) points.

    holds is true iff lhs <= rhs * (1 + 1e-12) at every point for both
    components; worst_ratio is the largest lhs/rhs encountered.
    """
    if lattice is None:
        lattice = default_lattice()
    lattice = np.asarray(lattice, dtype=float)
    if lattice.size == 0:
        raise EmptyLattice("envelope audit needs at least one (t, s) sample")
    t, s = lattice[:, 0], lattice[:, 1]

    lhs1 = np.asarray(pair.f1(t, t * s), dtype=float)
    rhs1 = pair.cbar1 * np.asarray(pair.f1(t, t), dtype=float) * pair.fbar1(s)
    lhs2 = np.asarray(pair.f2(t * s, t), dtype=float)
    rhs2 = pair.cbar2 * np.asarray(pair.f2(t, t), dtype=float) * pair.fbar2(s)

    lhs = np.concatenate([lhs1, lhs2])
    rhs = np.concatenate([rhs1, rhs2])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 1.0))
    worst = float(np.max(ratio))
    holds = bool(np.all(lhs <= rhs * (1.0 + _ENVELOPE_SLACK)))
    return EnvelopeReport(holds=holds, worst_ratio=worst)


@dataclass(frozen=True)
class C1Report:
    nondecreasing: bool
    positive_on_diagonal: bool

    @property
    def holds(self) -> bool:
        return self.nondecreasing and self.positive_on_diagonal


def check_c1(pair: NonlinearityPair, lattice=None) -> C1Report:
    """Spot-test that f_i are nondecreasing in each argument and that
    f1(s,s)*f2(s,s) > 0 for s > 0, on a sample lattice."""
    if lattice is None:
        lattice = default_lattice()
    lattice = np.asarray(lattice, dtype=float)
    if lattice.size == 0:
        raise EmptyLattice("hypothesis audit needs at least one sample")
    u, v = lattice[:, 0], lattice[:, 1]
    bump = 1.0 + 2.0**-6
    ok = True
    for f in (pair.f1, pair.f2):
        base = np.asarray(f(u, v), dtype=float)
        ok = ok and bool(np.all(base <= np.asarray(f(u * bump, v)) + 1e-12))
        ok = ok and bool(np.all(base <= np.asarray(f(u, v * bump)) + 1e-12))
    diag = np.unique(np.concatenate([u, v]))
    prod = np.asarray(pair.f1(diag, diag), dtype=float) * np.asarray(
        pair.f2(diag, diag), dtype=float
    )
    positive = bool(np.all(prod > 0))
    return C1Report(nondecreasing=ok, positive_on_diagonal=positive)


# --------------------------------------------------------------------------
# the assembled problem


@dataclass(frozen=True)
class ProblemSpec:
    """Everything that defines one radial problem instance.

    m1/m2 default to max(1, 1/a_i) and eps to 0.5; both only enter the
    growth functionals, not the solve itself.
    """

    n_dim: int
    a1: float
    a2: float
    weights: tuple
    nonlin: NonlinearityPair
    eps: float = 0.5
    m1: float = field(default=math.nan)
    m2: float = field(default=math.nan)

    def __post_init__(self):
        if int(self.n_dim) != self.n_dim or self.n_dim < 3:
            raise DimensionTooSmall(f"n_dim must be an integer >= 3, got {self.n_dim}")
        if not (self.a1 > 0 and self.a2 > 0):
            raise ValueError("central values a1, a2 must be positive")
        if not (self.eps > 0):
            raise ValueError(f"eps must be positive, got {self.eps}")
        if len(self.weights) != 2:
            raise ValueError("weights must be a pair (p1, p2)")
        if math.isnan(self.m1):
            object.__setattr__(self, "m1", max(1.0, 1.0 / self.a1))
        if math.isnan(self.m2):
            object.__setattr__(self, "m2", max(1.0, 1.0 / self.a2))
        if self.m1 < max(1.0, 1.0 / self.a1) - 1e-15:
            raise ValueError("m1 must be >= max(1, 1/a1)")
        if self.m2 < max(1.0, 1.0 / self.a2) - 1e-15:
            raise ValueError("m2 must be >= max(1, 1/a2)")

    @property
    def p1(self) -> WeightFn:
        return self.weights[0]

    @property
    def p2(self) -> WeightFn:
        return self.weights[1]
