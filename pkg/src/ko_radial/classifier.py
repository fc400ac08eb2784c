"""Decide the asymptotic verdict from the classified tails.

The decision procedure walks the theorems in precedence order (strongest
conclusions first): the two-sided sandwich certificate, its one-sided
variants, the bounded refinement, the mixed refinements, and finally the
large-solution criterion.  An Inconclusive tail blocks every theorem that
needs it (recorded in warnings); if both KO tails diverge but no
refinement decides the growth, existence alone is reported.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ProblemSpec
from .solver import SolutionPair
from .transforms import IntegralProfile, LimitClass

__all__ = [
    "Verdict",
    "Theorem",
    "ClassificationReport",
    "classify",
    "verify_sandwich",
    "SandwichReport",
]

_MARGIN = 1e-3


class Verdict(enum.Enum):
    BothLarge = "BothLarge"
    BothBounded = "BothBounded"
    ULargeVBounded = "ULargeVBounded"
    UBoundedVLarge = "UBoundedVLarge"
    ExistsUnclassified = "ExistsUnclassified"
    HypothesesNotMet = "HypothesesNotMet"


class Theorem(enum.Enum):
    T1 = "T1"
    T2 = "T2"
    T3a = "T3a"
    T3b = "T3b"
    T4 = "T4"
    T5i = "T5i"
    T5ii = "T5ii"
    NONE = "None"


@dataclass(frozen=True)
class ClassificationReport:
    verdict: Verdict
    theorem_applied: Theorem
    evidence: tuple
    warnings: tuple

    def evidence_for(self, name: str):
        for item in self.evidence:
            if item[0] == name:
                return item
        raise KeyError(name)


class _Blocked(Exception):
    """A required tail is Inconclusive; the theorem cannot be evaluated."""


class _Checker:
    """Accumulates evidence/warnings while testing one theorem's clauses."""

    def __init__(self, limits: dict, theorem: str):
        self.limits = limits
        self.theorem = theorem
        self.evidence: list = []
        self.warnings: list = []

    def _get(self, key: str) -> LimitClass:
        lim = self.limits[key]
        if lim.is_inconclusive:
            self.warnings.append(
                f"{self.theorem} blocked: {key}(inf) inconclusive ({lim.note})"
            )
            raise _Blocked(key)
        return lim

    def divergent(self, key: str) -> bool:
        lim = self._get(key)
        self.evidence.append((f"{self.theorem}: {key}(inf)", lim, ()))
        return lim.is_divergent

    def finite(self, key: str) -> bool:
        lim = self._get(key)
        self.evidence.append((f"{self.theorem}: {key}(inf)", lim, ()))
        return lim.is_finite

    def strictly_below(self, key_small: str, key_big: str) -> bool:
        """Both finite and small < big, with a marginality warning."""
        lo = self._get(key_small)
        hi = self._get(key_big)
        label = f"{self.theorem}: {key_small}(inf) < {key_big}(inf) < inf"
        if not (lo.is_finite and hi.is_finite):
            self.evidence.append((label, False, ()))
            return False
        ok = lo.estimate < hi.estimate
        self.evidence.append((label, ok, (lo.estimate, hi.estimate)))
        if abs(hi.estimate - lo.estimate) < _MARGIN * max(1.0, abs(hi.estimate)):
            self.warnings.append(
                f"{self.theorem}: criterion marginal, |{key_small} - {key_big}| = "
                f"{abs(hi.estimate - lo.estimate):.3g}"
            )
        return ok

    def radius_present(self, name: str, radius: Optional[float]) -> bool:
        self.evidence.append(
            (f"{self.theorem}: {name}", radius is not None, (radius,))
        )
        return radius is not None


def classify(
    spec: ProblemSpec,
    profile: IntegralProfile,
    sol: Optional[SolutionPair] = None,
    overflowed: bool = False,
) -> ClassificationReport:
    """Apply the theorems in precedence order T4, T5i, T5ii, T2, T3a, T3b, T1.

    ``sol``/``overflowed`` only feed the consistency cross-check of the
    necessity direction (a large or blown-up solve alongside finite
    eps-tails is reported as a warning, never as a verdict change).
    """
    lims = profile.limits
    evidence: list = []
    warnings: list = []

    def attempt(theorem: str, clauses) -> Optional[bool]:
        chk = _Checker(lims, theorem)
        try:
            fired = clauses(chk)
        except _Blocked:
            warnings.extend(chk.warnings)
            return None
        evidence.extend(chk.evidence)
        warnings.extend(chk.warnings)
        return fired

    plan = [
        (
            Theorem.T4,
            Verdict.BothBounded,
            lambda c: c.strictly_below("Pbar1", "KO1")
            and c.strictly_below("Pbar2", "KO2"),
        ),
        (
            Theorem.T5i,
            Verdict.ULargeVBounded,
            lambda c: c.divergent("KO1")
            and c.divergent("Plower")
            and c.strictly_below("Pbar2", "KO2"),
        ),
        (
            Theorem.T5ii,
            Verdict.UBoundedVLarge,
            lambda c: c.strictly_below("Pbar1", "KO1")
            and c.divergent("KO2")
            and c.divergent("Qlower"),
        ),
        (
            Theorem.T2,
            Verdict.BothBounded,
            lambda c: c.divergent("KO1")
            and c.divergent("KO2")
            and c.radius_present("r^(2N-2)p_i nondecreasing", profile.r_monotone)
            and c.finite("Pbar1_eps")
            and c.finite("Pbar2_eps"),
        ),
        (
            Theorem.T3a,
            Verdict.UBoundedVLarge,
            lambda c: c.divergent("KO1")
            and c.divergent("KO2")
            and c.radius_present("r^(2N-2)p_1 nondecreasing", profile.r_monotone1)
            and c.finite("Pbar1_eps")
            and c.divergent("Qlower"),
        ),
        (
            Theorem.T3b,
            Verdict.ULargeVBounded,
            lambda c: c.divergent("KO1")
            and c.divergent("KO2")
            and c.radius_present("r^(2N-2)p_2 nondecreasing", profile.r_monotone2)
            and c.divergent("Plower")
            and c.finite("Pbar2_eps"),
        ),
        (
            Theorem.T1,
            Verdict.BothLarge,
            lambda c: c.divergent("KO1")
            and c.divergent("KO2")
            and c.divergent("Plower")
            and c.divergent("Qlower"),
        ),
    ]

    fired: Optional[tuple] = None
    for theorem, verdict, clauses in plan:
        outcome = attempt(theorem.value, clauses)
        if outcome:
            fired = (theorem, verdict)
            break

    _necessity_check(spec, profile, sol, overflowed, evidence, warnings)

    if fired is not None:
        theorem, verdict = fired
        return ClassificationReport(verdict, theorem, tuple(evidence), tuple(warnings))

    ko1, ko2 = lims["KO1"], lims["KO2"]
    if ko1.is_divergent and ko2.is_divergent:
        warnings.append(
            "existence holds (both KO tails divergent) but no refinement "
            "determined the growth"
        )
        return ClassificationReport(
            Verdict.ExistsUnclassified, Theorem.T1, tuple(evidence), tuple(warnings)
        )
    return ClassificationReport(
        Verdict.HypothesesNotMet, Theorem.NONE, tuple(evidence), tuple(warnings)
    )


def _necessity_check(
    spec: ProblemSpec,
    profile: IntegralProfile,
    sol: Optional[SolutionPair],
    overflowed: bool,
    evidence: list,
    warnings: list,
):
    """Necessity direction of the bounded refinement, as a consistency check.

    A large solution (observed as overflow) with both weights eventually
    monotone should force both eps-tails to diverge; a Finite
    classification alongside is flagged.
    """
    if profile.r_monotone is None:
        return
    if sol is not None:
        nodes = sol.grid.nodes
        k = int(np.searchsorted(nodes, min(profile.r_monotone, nodes[-1])))
        k = min(max(k, 1), nodes.size - 1)
        c1 = (nodes[k] ** (spec.n_dim - 1) * sol.du.values[k]) ** 2
        c2 = (nodes[k] ** (spec.n_dim - 1) * sol.dv.values[k]) ** 2
        evidence.append(
            ("necessity_constants [R^(N-1)u'(R)]^2", True, (float(c1), float(c2)))
        )
    if not overflowed:
        return
    for key in ("Pbar1_eps", "Pbar2_eps"):
        lim = profile.limits.get(key)
        if lim is not None and lim.is_finite:
            warnings.append(
                f"consistency: solve blew up inside the domain but {key}(inf) "
                f"classified Finite({lim.estimate:.6g}); tail heuristics may be "
                "misreading this weight"
            )


@dataclass(frozen=True)
class SandwichCheck:
    name: str
    max_violation: float
    at_radius: float
    passed: bool
    vacuous_nodes: int = 0


@dataclass(frozen=True)
class SandwichReport:
    checks: tuple
    notes: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> SandwichCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_sandwich(
    sol: SolutionPair, profile: IntegralProfile, spec: ProblemSpec
) -> SandwichReport:
    """Node-wise check of  a_i + lower(r) <= component <= KOinv(sqrt(2 cbar_i) Pbar_i(r)).

    Where the upper bound's inverse query lands at or beyond KO(inf) the
    chain holds vacuously; those nodes are counted, not failed.
    """
    if not sol.grid.same_nodes(profile.grid):
        raise ValueError("solution and profile live on different grids")
    nodes = sol.grid.nodes
    h_sq = float(np.max(np.diff(nodes))) ** 2
    checks = []
    notes = []

    def chain(name, lhs, rhs, mask):
        viol = np.where(mask, lhs - rhs, -np.inf)
        i = int(np.argmax(viol))
        slack = 1e-6 * (1.0 + np.abs(np.where(mask, rhs, 0.0))) + h_sq
        ok = bool(np.all(viol <= np.where(mask, slack, np.inf)))
        vac = int(np.sum(~mask))
        checks.append(
            SandwichCheck(
                name=name,
                max_violation=float(viol[i]) if np.any(mask) else 0.0,
                at_radius=float(nodes[i]),
                passed=ok,
                vacuous_nodes=vac,
            )
        )
        if vac:
            notes.append(f"{name}: vacuous at {vac} nodes (beyond KO range)")

    every = np.ones_like(nodes, dtype=bool)
    chain("lower_u", spec.a1 + profile.plower.values, sol.u.values, every)
    chain("lower_v", spec.a2 + profile.qlower.values, sol.v.values, every)
    chain("upper_u", sol.u.values, profile.ko_bound_u.values, profile.ko_bound_u.mask)
    chain("upper_v", sol.v.values, profile.ko_bound_v.values, profile.ko_bound_v.mask)
    return SandwichReport(tuple(checks), tuple(notes))
