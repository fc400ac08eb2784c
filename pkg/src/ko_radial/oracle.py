"""Independent cross-check: direct integration of the radial ODE system.

    u'' + (N-1)/r u' = p1(r) f1(u, v)
    v'' + (N-1)/r v' = p2(r) f2(u, v)

with u'(0) = v'(0) = 0 and the curvature limits u''(0) = p1(0) f1(a1,a2)/N,
v''(0) = p2(0) f2(a1,a2)/N.  The first step from the origin uses the
series start u(h) ~ a1 + h^2/2 u''(0), u'(h) ~ h u''(0), avoiding the
singular (N-1)/r term; every later step is a classical fourth-order
Runge-Kutta step whose size equals the grid spacing, so node values are
directly comparable with the successive-approximation solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, Overflow
from .grids import RadialGrid, SampledFn
from .model import ProblemSpec
from .solver import OVERFLOW_LIMIT, SolutionPair

__all__ = ["direct_integrate", "compare_solutions", "ComparisonReport"]


def _rhs(spec: ProblemSpec, r: float, y: np.ndarray) -> np.ndarray:
    u, du, v, dv = y
    s = (spec.n_dim - 1) / r
    return np.array(
        [
            du,
            -s * du + float(spec.weights[0](r)) * float(spec.nonlin.f1(u, v)),
            dv,
            -s * dv + float(spec.weights[1](r)) * float(spec.nonlin.f2(u, v)),
        ]
    )


def direct_integrate(spec: ProblemSpec, grid: RadialGrid) -> SolutionPair:
    """Integrate the system node-to-node; raises Overflow on blow-up."""
    r = grid.nodes
    m = r.size
    out = np.empty((m, 4))
    c1 = float(spec.weights[0](0.0)) * float(
        spec.nonlin.f1(spec.a1, spec.a2)
    ) / spec.n_dim
    c2 = float(spec.weights[1](0.0)) * float(
        spec.nonlin.f2(spec.a1, spec.a2)
    ) / spec.n_dim
    out[0] = (spec.a1, 0.0, spec.a2, 0.0)
    h0 = r[1]
    out[1] = (
        spec.a1 + 0.5 * h0 * h0 * c1,
        h0 * c1,
        spec.a2 + 0.5 * h0 * h0 * c2,
        h0 * c2,
    )
    y = out[1].copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, m - 1):
            rk = r[k]
            h = r[k + 1] - rk
            k1 = _rhs(spec, rk, y)
            k2 = _rhs(spec, rk + 0.5 * h, y + 0.5 * h * k1)
            k3 = _rhs(spec, rk + 0.5 * h, y + 0.5 * h * k2)
            k4 = _rhs(spec, rk + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > OVERFLOW_LIMIT:
                raise Overflow(
                    f"direct integration blew up at r = {r[k + 1]:.6g}",
                    float(r[k + 1]),
                )
            out[k + 1] = y

    return SolutionPair(
        grid=grid,
        u=SampledFn(grid, out[:, 0]),
        v=SampledFn(grid, out[:, 2]),
        du=SampledFn(grid, out[:, 1]),
        dv=SampledFn(grid, out[:, 3]),
        iterations=m - 1,
        converged=True,
        sup_delta_history=np.zeros(0),
    )


@dataclass(frozen=True)
class ComparisonReport:
    sup_abs: float
    sup_rel: float
    argmax_radius: float


def compare_solutions(a: SolutionPair, b: SolutionPair) -> ComparisonReport:
    """Node-wise distance |u_a-u_b| + |v_a-v_b|, absolute and relative.

    The relative form normalizes by 1 + |u_a| + |v_a|.
    """
    if not a.grid.same_nodes(b.grid):
        raise GridMismatch("solutions live on different grids")
    diff = np.abs(a.u.values - b.u.values) + np.abs(a.v.values - b.v.values)
    rel = diff / (1.0 + np.abs(a.u.values) + np.abs(a.v.values))
    i = int(np.argmax(rel))
    return ComparisonReport(
        sup_abs=float(np.max(diff)),
        sup_rel=float(rel[i]),
        argmax_radius=float(a.grid.nodes[i]),
    )
