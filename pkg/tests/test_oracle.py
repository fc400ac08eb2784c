"""The direct ODE integrator, and its agreement with the fixed-point solver."""

import numpy as np
import pytest

import ko_radial as kr

from conftest import sinh_spec, sinh_true

RK4_TOL = 5e-12       # measured 6.5e-13 at m=1024
CROSS_CHECK_TOL = 2e-6  # dominated by the solver's O(h^2), measured 8.1e-7


@pytest.fixture(scope="module")
def sinh_direct():
    grid = kr.make_grid(2.0, 1024)
    return grid, kr.direct_integrate(sinh_spec(), grid)


def test_rk4_hits_closed_form(sinh_direct):
    grid, ref = sinh_direct
    truth = sinh_true(grid.nodes)
    assert float(np.max(np.abs(ref.u.values - truth))) < RK4_TOL
    np.testing.assert_array_equal(ref.u.values, ref.v.values)


def test_rk4_series_start():
    # u(h) = a1 + c h^2/2 with c = p1(0) f1(a1, a2) / N
    spec = kr.ProblemSpec(
        3, 2.0, 0.5, (kr.Constant(3.0), kr.Constant(1.0)), kr.power_pair(1.0, 1.0)
    )
    grid = kr.make_grid(1.0, 64)
    ref = kr.direct_integrate(spec, grid)
    h = grid.nodes[1]
    c1 = 3.0 * 0.5 / 3.0   # p1(0) f1(a1,a2) / N, f1 = v at the center
    c2 = 1.0 * 2.0 / 3.0
    assert ref.u.values[1] == 2.0 + 0.5 * h * h * c1
    assert ref.du.values[1] == h * c1
    assert ref.v.values[1] == 0.5 + 0.5 * h * h * c2


def test_two_methods_agree(sinh_direct):
    grid, ref = sinh_direct
    sol = kr.picard_solve(sinh_spec(), grid)
    rep = kr.compare_solutions(sol, ref)
    assert rep.sup_rel < CROSS_CHECK_TOL
    assert rep.sup_abs < 4.0 * CROSS_CHECK_TOL  # |u|+|v| stays below ~3.6


def test_profiles_are_monotone(sinh_direct):
    _, ref = sinh_direct
    assert np.all(ref.du.values >= -1e-12)
    assert np.all(np.diff(ref.u.values) >= -1e-12)


def test_direct_integration_overflow():
    spec = kr.ProblemSpec(
        3, 1.0, 1.0, (kr.Constant(1.0), kr.Constant(1.0)), kr.power_pair(3.0, 3.0)
    )
    with pytest.raises(kr.Overflow) as exc_info:
        kr.direct_integrate(spec, kr.make_grid(6.0, 2048))
    assert 0.0 < exc_info.value.radius <= 6.0


def test_compare_requires_same_grid(sinh_direct):
    _, ref = sinh_direct
    other = kr.direct_integrate(sinh_spec(), kr.make_grid(2.0, 512))
    with pytest.raises(kr.GridMismatch):
        kr.compare_solutions(ref, other)


def test_compare_self_is_zero(sinh_direct):
    _, ref = sinh_direct
    rep = kr.compare_solutions(ref, ref)
    assert rep.sup_abs == 0.0
    assert rep.sup_rel == 0.0
