import numpy as np
import pytest

import ko_radial as kr
from ko_radial.grids import _collapsed_radial

from conftest import sinh_spec, sinh_true

SUP_REL_TOL = 2e-6  # measured 8.1e-7 at m=1024 on [0, 2]


def _sup_rel_err(sol: kr.SolutionPair, truth: np.ndarray) -> float:
    return float(np.max(np.abs(sol.u.values - truth) / truth))


class TestSinhBenchmark:
    """power_pair(1,1) with unit weights solves to u = v = sinh(r)/r."""

    def test_profile_matches_closed_form(self, sinh_solution):
        _, grid, sol = sinh_solution
        assert sol.converged
        assert _sup_rel_err(sol, sinh_true(grid.nodes)) < SUP_REL_TOL

    def test_symmetry_is_exact(self, sinh_solution):
        _, _, sol = sinh_solution
        # identical data for both components: bitwise equal iterates
        assert float(np.max(np.abs(sol.u.values - sol.v.values))) == 0.0

    def test_derivative_matches_closed_form(self, sinh_solution):
        _, grid, sol = sinh_solution
        r = grid.nodes[1:]
        d_true = (r * np.cosh(r) - np.sinh(r)) / r**2
        assert sol.du.values[0] == 0.0
        # the s^(N-1) kernel biases the first cells by ~h^2/(6r)
        err = np.abs(sol.du.values[1:] - d_true)
        h = grid.nodes[1]
        assert np.all(err <= h**2 / (6.0 * r) * 1.2 + 1e-7)
        assert err[-1] < 1e-6

    def test_iteration_count_and_contraction(self, sinh_solution):
        _, _, sol = sinh_solution
        assert 8 <= sol.iterations <= 10
        deltas = sol.sup_delta_history
        ratios = deltas[2:] / deltas[1:-1]
        assert np.all(ratios < 0.5)

    def test_refinement_halves_error_quadratically(self):
        spec = sinh_spec()
        errs = []
        for m in (256, 512, 1024):
            grid = kr.make_grid(2.0, m)
            sol = kr.picard_solve(spec, grid)
            errs.append(_sup_rel_err(sol, sinh_true(grid.nodes)))
        for coarse, fine in zip(errs, errs[1:]):
            assert 3.5 < coarse / fine < 4.5

    def test_converged_pair_is_a_fixed_point(self, sinh_solution):
        spec, grid, sol = sinh_solution
        g1 = np.asarray(spec.nonlin.f1(sol.u.values, sol.v.values), dtype=float)
        reapplied = spec.a1 + _collapsed_radial(grid.nodes, g1, spec.n_dim)
        assert float(np.max(np.abs(reapplied - sol.u.values))) < 1e-10


def test_zero_weights_converge_in_one_sweep():
    spec = kr.ProblemSpec(
        3, 1.5, 0.5, (kr.Constant(0.0), kr.Constant(0.0)), kr.power_pair(1.0, 1.0)
    )
    sol = kr.picard_solve(spec, kr.make_grid(2.0, 64))
    assert sol.converged
    assert sol.iterations == 1
    np.testing.assert_array_equal(sol.u.values, 1.5)
    np.testing.assert_array_equal(sol.v.values, 0.5)
    np.testing.assert_array_equal(sol.sup_delta_history, [0.0])
    np.testing.assert_array_equal(sol.du.values, 0.0)


def test_monotone_iterates_audit(sinh_solution):
    _, _, sol = sinh_solution
    assert sol.history is not None
    assert kr.audit_monotone_iterates(sol.history)
    # negative control: push an early iterate above its successor
    u1, v1 = sol.history[1]
    bad = list(sol.history)
    bumped = u1.copy()
    bumped[5] += 1.0
    bad[1] = (bumped, v1)
    assert not kr.audit_monotone_iterates(tuple(bad))


def test_monotone_audit_trivial_histories():
    assert kr.audit_monotone_iterates(None)
    single_sweep = ((np.zeros(3), np.zeros(3)),)
    assert kr.audit_monotone_iterates(single_sweep)


def test_superlinear_growth_overflows_with_radius():
    spec = kr.ProblemSpec(
        3, 1.0, 1.0, (kr.Constant(1.0), kr.Constant(1.0)), kr.power_pair(3.0, 3.0)
    )
    with pytest.raises(kr.Overflow) as exc_info:
        kr.picard_solve(spec, kr.make_grid(6.0, 2048))
    assert 0.0 < exc_info.value.radius <= 6.0
    assert abs(exc_info.value.radius - 5.296875) < 1e-9


def test_max_iter_exhaustion_returns_partial_result():
    sol = kr.picard_solve(
        sinh_spec(), kr.make_grid(2.0, 64), kr.IterationConfig(max_iter=3)
    )
    assert not sol.converged
    assert sol.iterations == 3
    assert np.all(np.isfinite(sol.u.values))
    # the partial iterate still sits below the true profile
    assert np.all(sol.u.values <= sinh_true(sol.grid.nodes) + 1e-12)


@pytest.mark.parametrize("tol", [0.0, -1e-8])
def test_nonpositive_tolerance_rejected(tol):
    with pytest.raises(ValueError):
        kr.picard_solve(sinh_spec(), kr.make_grid(2.0, 64), kr.IterationConfig(tol=tol))


def test_apriori_bounds_hold_on_benchmark(sinh_solution, sinh_profile):
    spec, _, sol = sinh_solution
    report = kr.audit_apriori_bounds(sol, sinh_profile, spec)
    assert report.passed
    names = {c.name for c in report.checks}
    assert names == {
        "pair_sum_vs_zinv", "ko1_vs_pbar1", "ko2_vs_pbar2",
        "lower_bound_u", "lower_bound_v",
    }
    for check in report.checks:
        assert check.unavailable_nodes == 0
    # lower bounds share the solver's quadrature, so the defect is exact
    assert report["lower_bound_u"].max_violation <= 0.0
    assert report["lower_bound_v"].max_violation <= 0.0


def test_apriori_bounds_degenerate_equality():
    spec = kr.ProblemSpec(
        3, 1.0, 1.0, (kr.Constant(0.0), kr.Constant(0.0)), kr.power_pair(1.0, 1.0)
    )
    grid = kr.make_grid(2.0, 64)
    sol = kr.picard_solve(spec, grid)
    report = kr.audit_apriori_bounds(sol, kr.build_profile(spec, grid), spec)
    assert report.passed
    assert report["lower_bound_u"].max_violation == 0.0
    assert report["pair_sum_vs_zinv"].max_violation == 0.0


def test_mismatched_profile_grid_rejected(sinh_solution):
    spec, _, sol = sinh_solution
    other = kr.build_profile(spec, kr.make_grid(2.0, 512))
    with pytest.raises(ValueError):
        kr.audit_apriori_bounds(sol, other, spec)
