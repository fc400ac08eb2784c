"""Growth functionals as monotone tables, plus finite/divergent tail tests.

Everything the classifier consumes is computed here: the amplitude
bijections Z and KO_i with their inverses, the radial functionals P_i,
phi_i, Pbar_i, Pbar_i_eps, Plower, Qlower, the limit classification of
each functional's tail, and the detection of the radius beyond which
r^(2N-2) p(r) is nondecreasing.

Conventions worth knowing:

* P_i uses inner upper limit z, i.e. P_i(r) = int_0^r z^(1-N)
  int_0^z t^(N-1) p_i dt dz, matching the integral form of the system.
* Qlower mirrors Plower with the roles of the components swapped:
  its integrand is p2(t) * f2(a1 + f1(a1,a2) P1(t), a2).
* Z is tabulated on [a1+a2, s_max] with s_max doubled on demand (up to a
  hard cap) whenever an inverse query lands beyond the table and the
  tail test has not concluded Z(inf) finite.  KO ranges are managed the
  same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import (
    BeyondKORange,
    BeyondRange,
    BeyondZRange,
    MonotoneRadiusNotFound,
    NotStrictlyMonotone,
    Overflow,
    ZeroDenominator,
    ZeroInnerIntegral,
    ZRangeExhausted,
)
from .grids import (
    Geometric,
    RadialGrid,
    SampledFn,
    _collapsed_radial,
    cumulative_integral,
    make_grid,
    nested_radial_integral,
    running_max,
)
from .model import ProblemSpec, eval_weight_on_grid

__all__ = [
    "FunctionTable",
    "LimitClass",
    "TailPolicy",
    "IntegralProfile",
    "compute_Z",
    "compute_KO",
    "compute_P",
    "compute_Pbar",
    "compute_Pbar_eps",
    "compute_lower_bounds",
    "invert_table",
    "classify_limit",
    "detect_monotone_radius",
    "build_profile",
    "AutoRangeTable",
    "PartialFn",
    "eps_tail_integral",
]

# Quadrature resolution: cells per factor-of-two of the abscissa for the
# amplitude ladders, and total cells of a radial tail grid.
_PER_OCTAVE = 512
_TAIL_CELLS = 16384
_TAIL_RATIO = 2.0 ** (1.0 / _PER_OCTAVE)

#: Hard cap for Z / KO range doubling.
S_MAX_CAP = 1e12


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Piecewise-linear increasing table; invertible on its ordinate range."""

    abscissae: np.ndarray
    ordinates: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.abscissae, dtype=float)
        y = np.ascontiguousarray(self.ordinates, dtype=float)
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "ordinates", y)
        if x.size != y.size or x.size < 2:
            raise ValueError("table needs matching abscissae/ordinates, >= 2 points")
        if not np.all(np.diff(x) > 0):
            raise NotStrictlyMonotone("abscissae must be strictly increasing")
        if not np.all(np.diff(y) > 0):
            raise NotStrictlyMonotone(
                "ordinates must be strictly increasing (collapse ties first)"
            )

    @property
    def domain_lo(self) -> float:
        return float(self.abscissae[0])

    @property
    def domain_hi(self) -> float:
        return float(self.abscissae[-1])

    @staticmethod
    def from_samples(x, y) -> "FunctionTable":
        """Build a table from nondecreasing samples, collapsing flat spans.

        Of each flat run only the left endpoint is kept, so the inverse of
        a collapsed table maps the shared ordinate to the left endpoint.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.concatenate([[True], np.diff(y) > 0])
        if keep.sum() < 2:
            raise NotStrictlyMonotone("table is flat; nothing left after collapsing")
        return FunctionTable(x[keep], y[keep])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain_lo, self.domain_hi
        slack = 1e-9 * (hi - lo)
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise BeyondRange(
                f"query outside table domain [{lo:.6g}, {hi:.6g}]"
            )
        out = np.interp(np.clip(x, lo, hi), self.abscissae, self.ordinates)
        return float(out) if out.ndim == 0 else out


def invert_table(t: FunctionTable) -> FunctionTable:
    """Swap abscissae and ordinates (both strictly increasing)."""
    return FunctionTable(t.ordinates, t.abscissae)


# --------------------------------------------------------------------------
# limit classification


@dataclass(frozen=True)
class LimitClass:
    """Outcome of the doubling test on a tail r |-> F(r).

    kind is one of "finite", "divergent", "inconclusive"; finite verdicts
    carry an estimate, divergent ones a growth note, inconclusive ones the
    cause.  evidence holds the (radius, value) samples that were seen.
    """

    kind: str
    estimate: Optional[float] = None
    note: str = ""
    evidence: tuple = ()

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_divergent(self) -> bool:
        return self.kind == "divergent"

    @property
    def is_inconclusive(self) -> bool:
        return self.kind == "inconclusive"

    def __str__(self):
        if self.is_finite:
            return f"Finite({self.estimate:.6g})"
        if self.is_divergent:
            return f"Divergent({self.note})"
        return f"Inconclusive({self.note})"

    @staticmethod
    def finite(estimate: float, evidence=()) -> "LimitClass":
        return LimitClass("finite", estimate=float(estimate), evidence=tuple(evidence))

    @staticmethod
    def divergent(note: str, evidence=()) -> "LimitClass":
        return LimitClass("divergent", note=note, evidence=tuple(evidence))

    @staticmethod
    def inconclusive(note: str, evidence=()) -> "LimitClass":
        return LimitClass("inconclusive", note=note, evidence=tuple(evidence))


@dataclass(frozen=True)
class TailPolicy:
    """Where and how hard to probe a tail: radii r0 * 2^k, k = 0..doublings."""

    r0: float = 1.0
    doublings: int = 24
    rel_tol: float = 1e-3
    div_threshold: float = 1e6
    growth_floor: float = 1.1
    abs_tol: float = 1e-6


def classify_limit(tail_fn: Callable[[float], float], policy: TailPolicy) -> LimitClass:
    """Classify lim F(r) as r -> inf by sampling F at doubling radii.

    Finite: two consecutive doublings change the value by less than
    rel_tol * (1 + |value|).  The reported estimate extrapolates the
    remaining geometric tail when the increment ratio is stable (for a
    1/r-type tail this recovers the limit to quadrature accuracy).

    Divergent: the value exceeds div_threshold, or the per-doubling
    increment ratio stays >= growth_floor, or the increments are
    numerically constant and non-vanishing (log-type growth).

    Anything else - including an evaluation failure, which is recorded
    with its cause - is Inconclusive.
    """
    evidence: list = []
    prev_v: Optional[float] = None
    prev_d: Optional[float] = None
    flat = grow = logn = 0
    last_ratio = math.nan
    for k in range(policy.doublings + 1):
        r = policy.r0 * 2.0**k
        try:
            v = float(tail_fn(r))
        except (BeyondRange, Overflow, ZeroDivisionError, ArithmeticError) as exc:
            return LimitClass.inconclusive(
                f"evaluation failed at r={r:.6g}: {exc}", evidence
            )
        evidence.append((r, v))
        if not math.isfinite(v) or v > policy.div_threshold:
            return LimitClass.divergent(
                f"value {v:.6g} exceeded {policy.div_threshold:.2g} at r={r:.6g}",
                evidence,
            )
        if prev_v is not None:
            d = v - prev_v
            if abs(d) < policy.rel_tol * (1.0 + abs(v)):
                flat += 1
                grow = logn = 0
            else:
                flat = 0
                if prev_d is not None and abs(prev_d) > 0:
                    ratio = d / prev_d
                    last_ratio = ratio
                    grow = grow + 1 if ratio >= policy.growth_floor else 0
                    steady = abs(d - prev_d) <= 0.05 * max(abs(d), abs(prev_d))
                    logn = logn + 1 if (abs(d) > policy.abs_tol and steady) else 0
                    if grow >= 2:
                        return LimitClass.divergent(
                            f"increment ratio {ratio:.4g} >= {policy.growth_floor}",
                            evidence,
                        )
                    if logn >= 2:
                        return LimitClass.divergent(
                            "constant per-doubling increments (log-type growth)",
                            evidence,
                        )
            if flat >= 2:
                est = v
                if prev_d is not None and abs(prev_d) > 0:
                    rho = d / prev_d
                    if 0.0 < rho < 0.75:
                        # geometric tail: remaining mass ~ d * rho / (1 - rho)
                        est = v + d * rho / (1.0 - rho)
                return LimitClass.finite(est, evidence)
            prev_d = d
        prev_v = v
    note = "no conclusion after all doublings"
    if math.isfinite(last_ratio):
        note += f" (last increment ratio {last_ratio:.4g})"
    return LimitClass.inconclusive(note, evidence)


# --------------------------------------------------------------------------
# amplitude tables: Z and KO


def _ladder(s0: float, s_max: float) -> np.ndarray:
    """Geometric abscissae from s0 to (at least) s_max, _PER_OCTAVE per octave."""
    n = max(1, math.ceil(_PER_OCTAVE * math.log2(s_max / s0)))
    return s0 * 2.0 ** (np.arange(n + 1) / _PER_OCTAVE)


def _cumtrapz(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[0] = 0.0
    np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(x), out=out[1:])
    return out


def compute_Z(spec: ProblemSpec, s_max: float) -> FunctionTable:
    """Z(r) = int_{a1+a2}^r dt / (f1(t,t) + f2(t,t)) on [a1+a2, s_max]."""
    s0 = spec.a1 + spec.a2
    if not s_max > s0:
        raise ValueError(f"s_max must exceed a1+a2 = {s0}")
    nodes = _ladder(s0, s_max)
    denom = np.asarray(spec.nonlin.diag(nodes), dtype=float)
    if np.any(denom <= 0) or not np.all(np.isfinite(denom)):
        bad = nodes[np.argmax(~((denom > 0) & np.isfinite(denom)))]
        raise ZeroDenominator(f"f1(t,t)+f2(t,t) not positive near t={bad:.6g}")
    return FunctionTable(nodes, _cumtrapz(nodes, 1.0 / denom))


def compute_KO(spec: ProblemSpec, which: int, s_max: float) -> FunctionTable:
    """KO_{f_i}(r) = int_{a_i}^r (int_0^s f_i(t,t) dt)^(-1/2) ds."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    a = spec.a1 if which == 1 else spec.a2
    f = spec.nonlin.f1 if which == 1 else spec.nonlin.f2
    if not s_max > a:
        raise ValueError(f"s_max must exceed a{which} = {a}")
    ramp = np.linspace(0.0, a, _PER_OCTAVE + 1)
    geo = _ladder(a, s_max)
    nodes = np.concatenate([ramp, geo[1:]])
    fd = np.asarray(f(nodes, nodes), dtype=float)
    inner = _cumtrapz(nodes, fd)
    i0 = _PER_OCTAVE  # index of a
    if np.any(inner[i0:] <= 0):
        raise ZeroInnerIntegral(
            f"int_0^s f{which}(t,t) dt vanishes at or beyond s = {a}"
        )
    tail_nodes = nodes[i0:]
    vals = _cumtrapz(tail_nodes, inner[i0:] ** -0.5)
    return FunctionTable(tail_nodes, vals)


class AutoRangeTable:
    """An increasing table whose abscissa range grows on demand.

    Wraps a rebuild closure s_max -> FunctionTable.  Forward evaluation
    extends the range until the query is covered (or the cap is hit);
    inverse evaluation additionally consults the tail classification so
    that a query beyond a finite limit fails fast with the exhausted
    error instead of doubling to the cap.
    """

    def __init__(
        self,
        rebuild: Callable[[float], FunctionTable],
        s0: float,
        *,
        s_max: float = 0.0,
        cap: float = S_MAX_CAP,
        exhausted: type = ZRangeExhausted,
        label: str = "Z",
        policy: TailPolicy = TailPolicy(),
    ):
        self._rebuild = rebuild
        self._s0 = s0
        self._cap = cap
        self._exhausted = exhausted
        self._label = label
        self._policy = policy
        self._s_max = min(max(s_max, 4.0 * s0, s0 + 1.0), cap)
        self._table = rebuild(self._s_max)
        self._limit: Optional[LimitClass] = None

    @property
    def table(self) -> FunctionTable:
        return self._table

    def _grow(self, s_new: float):
        self._s_max = min(max(s_new, self._s_max * 2.0), self._cap)
        self._table = self._rebuild(self._s_max)

    def eval(self, s: float) -> float:
        while s > self._table.domain_hi:
            if self._s_max >= self._cap:
                raise self._exhausted(
                    f"{self._label}: abscissa {s:.6g} beyond cap {self._cap:.3g}"
                )
            self._grow(s)
        return float(self._table(s))

    def limit(self) -> LimitClass:
        """Tail classification of the table's own limit, cached."""
        if self._limit is None:
            pol = replace(self._policy, r0=max(2.0 * self._s0, self._s0 + 1.0))
            self._limit = classify_limit(self.eval, pol)
        return self._limit

    def eval_inverse(self, y: float) -> float:
        if y < -1e-12:
            raise BeyondRange(f"{self._label}: inverse query {y} is negative")
        y = max(y, 0.0)
        while y > float(self._table.ordinates[-1]):
            lim = self.limit()
            if lim.is_finite and y >= lim.estimate * (1.0 - 1e-9):
                raise self._exhausted(
                    f"{self._label}(inf) ~= {lim.estimate:.6g} is finite; "
                    f"inverse query {y:.6g} escapes the range"
                )
            if self._s_max >= self._cap:
                raise self._exhausted(
                    f"{self._label}: inverse query {y:.6g} not covered at cap"
                )
            self._grow(self._s_max * 2.0)
        return float(np.interp(y, self._table.ordinates, self._table.abscissae))

    def eval_inverse_many(self, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized inverse with an availability mask (no exceptions)."""
        ys = np.asarray(ys, dtype=float)
        ymax = float(np.max(ys)) if ys.size else 0.0
        try:
            self.eval_inverse(ymax)
        except BeyondRange:
            pass
        ords = self._table.ordinates
        mask = ys <= float(ords[-1])
        out = np.full(ys.shape, np.nan)
        out[mask] = np.interp(np.clip(ys[mask], 0.0, None), ords, self._table.abscissae)
        return out, mask


def z_auto(spec: ProblemSpec, policy: TailPolicy = TailPolicy()) -> AutoRangeTable:
    return AutoRangeTable(
        lambda s: compute_Z(spec, s),
        spec.a1 + spec.a2,
        exhausted=ZRangeExhausted,
        label="Z",
        policy=policy,
    )


def ko_auto(
    spec: ProblemSpec, which: int, policy: TailPolicy = TailPolicy()
) -> AutoRangeTable:
    a = spec.a1 if which == 1 else spec.a2
    return AutoRangeTable(
        lambda s: compute_KO(spec, which, s),
        a,
        exhausted=BeyondKORange,
        label=f"KO{which}",
        policy=policy,
    )


# --------------------------------------------------------------------------
# radial functionals


def compute_P(spec: ProblemSpec, which: int, grid: RadialGrid) -> SampledFn:
    """P_i(r) = int_0^r z^(1-N) int_0^z t^(N-1) p_i(t) dt dz."""
    w = spec.weights[0] if which == 1 else spec.weights[1]
    return nested_radial_integral(eval_weight_on_grid(w, grid), spec.n_dim)


def compute_lower_bounds(
    spec: ProblemSpec, grid: RadialGrid
) -> tuple[SampledFn, SampledFn]:
    """The lower-bound functionals (Plower, Qlower).

    Plower feeds the frozen pair (a1, a2 + f2(a1,a2) P2(t)) through f1;
    Qlower swaps the roles of the components.
    """
    n = grid.nodes
    a1v = np.full_like(n, spec.a1)
    a2v = np.full_like(n, spec.a2)
    f1aa = float(np.asarray(spec.nonlin.f1(spec.a1, spec.a2)))
    f2aa = float(np.asarray(spec.nonlin.f2(spec.a1, spec.a2)))
    p1 = eval_weight_on_grid(spec.weights[0], grid)
    p2 = eval_weight_on_grid(spec.weights[1], grid)
    p2_tab = _collapsed_radial(n, p2.values, spec.n_dim)
    p1_tab = _collapsed_radial(n, p1.values, spec.n_dim)
    g1 = p1.values * np.asarray(
        spec.nonlin.f1(a1v, a2v + f2aa * p2_tab), dtype=float
    )
    g2 = p2.values * np.asarray(
        spec.nonlin.f2(a1v + f1aa * p1_tab, a2v), dtype=float
    )
    plower = SampledFn(grid, _collapsed_radial(grid.nodes, g1, spec.n_dim))
    qlower = SampledFn(grid, _collapsed_radial(grid.nodes, g2, spec.n_dim))
    return plower, qlower


def _pbar_factor(
    spec: ProblemSpec, which: int, zinv_vals: np.ndarray, *, sqrt: bool
) -> np.ndarray:
    m = spec.m1 if which == 1 else spec.m2
    fbar = spec.nonlin.fbar1 if which == 1 else spec.nonlin.fbar2
    vals = np.asarray(fbar(m * (1.0 + zinv_vals)), dtype=float)
    return np.sqrt(vals) if sqrt else vals


def compute_Pbar(
    spec: ProblemSpec, which: int, grid: RadialGrid, zauto: AutoRangeTable
) -> SampledFn:
    """Pbar_i(r) = sqrt(fbar_i(M_i (1 + Z^-1(P1+P2)))) * int_0^r sqrt(phi_i).

    Raises BeyondZRange / ZRangeExhausted when Z^-1 cannot cover the
    needed range on this grid.
    """
    psum = compute_P(spec, 1, grid).values + compute_P(spec, 2, grid).values
    zinv_vals, mask = zauto.eval_inverse_many(psum)
    if not np.all(mask):
        r_bad = grid.nodes[np.argmax(~mask)]
        raise ZRangeExhausted(
            f"Z^-1 range exhausted at r = {r_bad:.6g} (P1+P2 = "
            f"{psum[np.argmax(~mask)]:.6g})"
        )
    w = spec.weights[0] if which == 1 else spec.weights[1]
    phi = running_max(eval_weight_on_grid(w, grid))
    tail = _cumtrapz(grid.nodes, np.sqrt(phi.values))
    return SampledFn(grid, _pbar_factor(spec, which, zinv_vals, sqrt=True) * tail)


def eps_tail_integral(
    weight: Callable, eps: float, r_lo: float, grid: RadialGrid
) -> np.ndarray:
    """int_{r_lo}^{r} t^(1+eps) p(t) dt at the grid nodes (0 below r_lo).

    ``weight`` may be any callable of r; only nodes >= r_lo are touched,
    so weights that are singular at 0 are fine here.
    """
    n = grid.nodes
    sel = n >= r_lo
    out = np.zeros_like(n)
    if sel.sum() < 2:
        return out
    x = np.concatenate([[r_lo], n[sel]]) if n[sel][0] > r_lo else n[sel]
    v = x ** (1.0 + eps) * np.asarray(weight(x), dtype=float)
    cum = _cumtrapz(x, v)
    out[sel] = cum[-sel.sum():]
    return out


def compute_Pbar_eps(
    spec: ProblemSpec,
    which: int,
    grid: RadialGrid,
    r_monotone: Optional[float],
    zauto: AutoRangeTable,
) -> SampledFn:
    """Pbar_i_eps(r) = fbar_i(M_i (1 + Z^-1(P1+P2))) * int_R^r t^(1+eps) p_i.

    R is the detected monotone radius; nodes below R carry 0.
    """
    if r_monotone is None:
        raise MonotoneRadiusNotFound(
            f"no radius with r^(2N-2) p{which}(r) nondecreasing was detected"
        )
    psum = compute_P(spec, 1, grid).values + compute_P(spec, 2, grid).values
    zinv_vals, mask = zauto.eval_inverse_many(psum)
    if not np.all(mask):
        r_bad = grid.nodes[np.argmax(~mask)]
        raise ZRangeExhausted(f"Z^-1 range exhausted at r = {r_bad:.6g}")
    w = spec.weights[0] if which == 1 else spec.weights[1]
    tail = eps_tail_integral(w, spec.eps, r_monotone, grid)
    return SampledFn(grid, _pbar_factor(spec, which, zinv_vals, sqrt=False) * tail)


def detect_monotone_radius(
    weight: Callable, n_dim: int, grid: RadialGrid
) -> Optional[float]:
    """Smallest grid node R with g(r) = r^(2N-2) p(r) nondecreasing beyond R.

    Nondecreasing is tested pairwise with a 1e-10 relative slack.  Returns
    None when even the final pair decreases (no suffix of the grid
    qualifies).
    """
    n = grid.nodes
    g = n ** (2 * n_dim - 2) * np.asarray(weight(n), dtype=float)
    ok = g[1:] >= g[:-1] * (1.0 - 1e-10)
    if not ok[-1]:
        return None
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return 0.0
    return float(n[bad[-1] + 1])


# --------------------------------------------------------------------------
# tail evaluation at large radii


def _tail_grid(r: float) -> RadialGrid:
    return make_grid(r, _TAIL_CELLS, Geometric(_TAIL_RATIO))


class TailKit:
    """Evaluators for the radial functionals at arbitrary (large) radii.

    Each evaluation builds a dedicated geometric grid on [0, r]; grids are
    cached per radius since the doubling test revisits the same radii for
    several functionals.
    """

    def __init__(self, spec: ProblemSpec, zauto: AutoRangeTable):
        self.spec = spec
        self.zauto = zauto
        self._grids: dict[float, RadialGrid] = {}

    def _grid(self, r: float) -> RadialGrid:
        g = self._grids.get(r)
        if g is None:
            g = self._grids[r] = _tail_grid(r)
        return g

    def p_end(self, which: int, r: float) -> float:
        return compute_P(self.spec, which, self._grid(r)).at_end()

    def p_sum_end(self, r: float) -> float:
        return self.p_end(1, r) + self.p_end(2, r)

    def pbar(self, which: int, r: float) -> float:
        spec = self.spec
        s = self.zauto.eval_inverse(self.p_sum_end(r))
        factor = float(_pbar_factor(spec, which, np.asarray(s), sqrt=True))
        grid = self._grid(r)
        w = spec.weights[0] if which == 1 else spec.weights[1]
        phi = running_max(eval_weight_on_grid(w, grid))
        return factor * float(_cumtrapz(grid.nodes, np.sqrt(phi.values))[-1])

    def pbar_eps(self, which: int, r: float, r_monotone: float) -> float:
        spec = self.spec
        s = self.zauto.eval_inverse(self.p_sum_end(r))
        factor = float(_pbar_factor(spec, which, np.asarray(s), sqrt=False))
        grid = self._grid(r)
        w = spec.weights[0] if which == 1 else spec.weights[1]
        if r <= r_monotone:
            return 0.0
        return factor * float(eps_tail_integral(w, spec.eps, r_monotone, grid)[-1])

    def lower(self, which: int, r: float) -> float:
        pl, ql = compute_lower_bounds(self.spec, self._grid(r))
        return pl.at_end() if which == 1 else ql.at_end()


# --------------------------------------------------------------------------
# the assembled profile


@dataclass(frozen=True, eq=False)
class PartialFn:
    """Node values that are only available on part of a grid."""

    grid: RadialGrid
    values: np.ndarray
    mask: np.ndarray
    note: str = ""

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        m = np.ascontiguousarray(self.mask, dtype=bool)
        v.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mask", m)
        if v.shape != self.grid.nodes.shape or m.shape != self.grid.nodes.shape:
            raise ValueError("values/mask and grid nodes differ in length")

    @property
    def complete(self) -> bool:
        return bool(np.all(self.mask))


@dataclass(frozen=True, eq=False)
class IntegralProfile:
    """Every functional the theorems consult, on one grid, plus tail limits.

    ``limits`` maps {"KO1","KO2","Pbar1","Pbar2","Pbar1_eps","Pbar2_eps",
    "Plower","Qlower"} to LimitClass.  ``r_monotone`` is the joint radius
    beyond which both r^(2N-2) p_i are nondecreasing (None if either
    weight never settles); the per-weight radii are kept alongside since
    the one-sided theorems only need one of them.
    """

    grid: RadialGrid
    p1_tab: SampledFn
    p2_tab: SampledFn
    phi1: SampledFn
    phi2: SampledFn
    plower: SampledFn
    qlower: SampledFn
    zinv_bound: PartialFn
    pbar1: PartialFn
    pbar2: PartialFn
    pbar1_eps: Optional[PartialFn]
    pbar2_eps: Optional[PartialFn]
    ko_bound_u: PartialFn
    ko_bound_v: PartialFn
    z_tab: FunctionTable
    z_inv: FunctionTable
    ko1: FunctionTable
    ko2: FunctionTable
    ko1_inv: FunctionTable
    ko2_inv: FunctionTable
    r_monotone: Optional[float]
    r_monotone1: Optional[float]
    r_monotone2: Optional[float]
    limits: dict


def _masked(grid: RadialGrid, values: np.ndarray, mask: np.ndarray, note="") -> PartialFn:
    vals = np.where(mask, values, np.nan)
    return PartialFn(grid, vals, mask, note)


def build_profile(
    spec: ProblemSpec, grid: RadialGrid, policy: TailPolicy | None = None
) -> IntegralProfile:
    """Compute every functional and classify every tail the theorems need."""
    if policy is None:
        policy = TailPolicy(r0=max(grid.r_max, 1.0))
    n = grid.nodes

    p1_tab = compute_P(spec, 1, grid)
    p2_tab = compute_P(spec, 2, grid)
    w1 = eval_weight_on_grid(spec.weights[0], grid)
    w2 = eval_weight_on_grid(spec.weights[1], grid)
    phi1 = running_max(w1)
    phi2 = running_max(w2)
    plower, qlower = compute_lower_bounds(spec, grid)

    zauto = z_auto(spec, policy)
    psum = p1_tab.values + p2_tab.values
    zinv_vals, zmask = zauto.eval_inverse_many(psum)
    zinv_bound = _masked(grid, zinv_vals, zmask, "Z^-1(P1+P2)")

    sqrt_phi1 = _cumtrapz(n, np.sqrt(phi1.values))
    sqrt_phi2 = _cumtrapz(n, np.sqrt(phi2.values))
    with np.errstate(invalid="ignore"):
        pbar1 = _masked(
            grid, _pbar_factor(spec, 1, zinv_vals, sqrt=True) * sqrt_phi1, zmask
        )
        pbar2 = _masked(
            grid, _pbar_factor(spec, 2, zinv_vals, sqrt=True) * sqrt_phi2, zmask
        )

    # monotone radii are detected on a wide horizon so that a weight that
    # only turns around beyond r_max is still refused
    horizon = max(policy.r0 * 2.0**policy.doublings, grid.r_max)
    wide = _tail_grid(horizon)
    r_mono1 = detect_monotone_radius(spec.weights[0], spec.n_dim, wide)
    r_mono2 = detect_monotone_radius(spec.weights[1], spec.n_dim, wide)
    r_monotone = None
    if r_mono1 is not None and r_mono2 is not None:
        r_monotone = max(r_mono1, r_mono2)

    def eps_table(which: int, r_mono: Optional[float]) -> Optional[PartialFn]:
        if r_mono is None:
            return None
        w = spec.weights[0] if which == 1 else spec.weights[1]
        tail = eps_tail_integral(w, spec.eps, r_mono, grid)
        with np.errstate(invalid="ignore"):
            vals = _pbar_factor(spec, which, zinv_vals, sqrt=False) * tail
        return _masked(grid, vals, zmask)

    pbar1_eps = eps_table(1, r_mono1)
    pbar2_eps = eps_table(2, r_mono2)

    ko1a = ko_auto(spec, 1, policy)
    ko2a = ko_auto(spec, 2, policy)

    def ko_bounds(koa: AutoRangeTable, pbar: PartialFn, cbar: float) -> PartialFn:
        ys = np.where(pbar.mask, math.sqrt(2.0 * cbar) * pbar.values, 0.0)
        vals, mask = koa.eval_inverse_many(ys)
        return _masked(grid, vals, mask & pbar.mask, "KO^-1(sqrt(2 cbar) Pbar)")

    ko_bound_u = ko_bounds(ko1a, pbar1, spec.nonlin.cbar1)
    ko_bound_v = ko_bounds(ko2a, pbar2, spec.nonlin.cbar2)

    kit = TailKit(spec, zauto)
    limits = {
        "KO1": ko1a.limit(),
        "KO2": ko2a.limit(),
        "Pbar1": classify_limit(lambda r: kit.pbar(1, r), policy),
        "Pbar2": classify_limit(lambda r: kit.pbar(2, r), policy),
        "Plower": classify_limit(lambda r: kit.lower(1, r), policy),
        "Qlower": classify_limit(lambda r: kit.lower(2, r), policy),
    }
    for which, r_mono in ((1, r_mono1), (2, r_mono2)):
        key = f"Pbar{which}_eps"
        if r_mono is None:
            limits[key] = LimitClass.inconclusive(
                f"r^(2N-2) p{which}(r) never becomes nondecreasing on the horizon"
            )
        else:
            limits[key] = classify_limit(
                lambda r, w=which, rm=r_mono: kit.pbar_eps(w, r, rm), policy
            )

    z_tab = zauto.table
    ko1 = ko1a.table
    ko2 = ko2a.table
    return IntegralProfile(
        grid=grid,
        p1_tab=p1_tab,
        p2_tab=p2_tab,
        phi1=phi1,
        phi2=phi2,
        plower=plower,
        qlower=qlower,
        zinv_bound=zinv_bound,
        pbar1=pbar1,
        pbar2=pbar2,
        pbar1_eps=pbar1_eps,
        pbar2_eps=pbar2_eps,
        ko_bound_u=ko_bound_u,
        ko_bound_v=ko_bound_v,
        z_tab=z_tab,
        z_inv=invert_table(z_tab),
        ko1=ko1,
        ko2=ko2,
        ko1_inv=invert_table(ko1),
        ko2_inv=invert_table(ko2),
        r_monotone=r_monotone,
        r_monotone1=r_mono1,
        r_monotone2=r_mono2,
        limits=limits,
    )
