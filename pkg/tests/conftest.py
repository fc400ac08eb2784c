"""Shared problem definitions for the test suite.

The five "frozen" configurations exercised by the classifier and
acceptance tests live here so every test file agrees on them exactly.
"""

import numpy as np
import pytest

import ko_radial as kr

ONE = kr.Constant(1.0)
ZERO = kr.Constant(0.0)
DEC = kr.PowerDecay(0.01, 4.0)


def sinh_spec() -> kr.ProblemSpec:
    """Coupled linear system with unit weights; u = v = sinh(r)/r."""
    return kr.ProblemSpec(3, 1.0, 1.0, (ONE, ONE), kr.power_pair(1.0, 1.0))


def sinh_true(nodes: np.ndarray) -> np.ndarray:
    out = np.ones_like(nodes)
    out[1:] = np.sinh(nodes[1:]) / nodes[1:]
    return out


def frozen_cases() -> dict:
    """Tag -> (spec, r_max) for the five classification scenarios."""
    return {
        "i": (kr.ProblemSpec(3, 1, 1, (ONE, ONE), kr.power_pair(0.5, 0.5)), 5.0),
        "ii": (kr.ProblemSpec(3, 1, 1, (DEC, DEC), kr.power_pair(3.0, 3.0)), 10.0),
        "iii": (kr.ProblemSpec(3, 1, 1, (DEC, ONE), kr.power_pair(3.0, 0.5)), 3.0),
        "iv": (kr.ProblemSpec(3, 1, 1, (ONE, DEC), kr.power_pair(0.5, 3.0)), 3.0),
        "v": (kr.ProblemSpec(3, 1, 1, (ZERO, ZERO), kr.power_pair(3.0, 3.0)), 2.0),
    }


@pytest.fixture(scope="session")
def sinh_solution():
    """One converged sinh run (m=1024, audit on) shared by several tests."""
    spec = sinh_spec()
    grid = kr.make_grid(2.0, 1024)
    sol = kr.picard_solve(spec, grid, kr.IterationConfig(audit=True))
    return spec, grid, sol


@pytest.fixture(scope="session")
def sinh_profile(sinh_solution):
    spec, grid, _ = sinh_solution
    return kr.build_profile(spec, grid)
