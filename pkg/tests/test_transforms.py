import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ko_radial as kr
from ko_radial.transforms import ko_auto, z_auto

ONE = kr.Constant(1.0)


def _spec(a, pair, w1=ONE, w2=ONE):
    return kr.ProblemSpec(3, a, a, (w1, w2), pair)


# ---------------------------------------------------------------------------
# Z and its inverse


def test_z_log_closed_form():
    # power_pair(1,1), a1=a2=0.5: denominator f1+f2 = 2t, Z(r) = ln(r)/2
    spec = _spec(0.5, kr.power_pair(1.0, 1.0))
    tab = kr.compute_Z(spec, float(np.e**2) + 1.0)
    assert tab(1.0) == 0.0  # Z at a1+a2
    assert abs(tab(float(np.e**2)) - 1.0) < 1e-3


def test_z_rational_closed_form_and_inverse():
    # power_pair(2,2), a1=a2=0.5: Z(r) = (1 - 1/r)/2, so Z(2) = 0.25
    spec = _spec(0.5, kr.power_pair(2.0, 2.0))
    tab = kr.compute_Z(spec, 8.0)
    assert abs(tab(2.0) - 0.25) < 1e-3
    inv = kr.invert_table(tab)
    assert abs(inv(0.25) - 2.0) < 1e-3


def test_z_zero_denominator():
    dead = kr.NonlinearityPair(
        f1=lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
        f2=lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
        cbar1=1.0, fbar1=lambda s: np.asarray(s, dtype=float),
        cbar2=1.0, fbar2=lambda s: np.asarray(s, dtype=float),
    )
    spec = _spec(1.0, dead)
    with pytest.raises(kr.ZeroDenominator):
        kr.compute_Z(spec, 4.0)
    with pytest.raises(kr.ZeroInnerIntegral):
        kr.compute_KO(spec, 1, 4.0)


def test_invert_table_contract():
    x = np.linspace(0.0, 2.0, 21)
    t = kr.FunctionTable.from_samples(x, x)  # identity
    inv = kr.invert_table(t)
    np.testing.assert_allclose(inv.ordinates, t.ordinates)

    with pytest.raises(kr.NotStrictlyMonotone):
        kr.FunctionTable(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 1.0]))
    with pytest.raises(kr.NotStrictlyMonotone):
        # everything collapses away
        kr.FunctionTable.from_samples(np.arange(4.0), np.zeros(4))


def test_inverse_query_beyond_range():
    t = kr.FunctionTable.from_samples(
        np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 4.0])
    )
    inv = kr.invert_table(t)
    with pytest.raises(kr.BeyondRange):
        inv(5.0)


def test_flat_spans_collapse_to_left_endpoint():
    t = kr.FunctionTable.from_samples(
        np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.0, 1.0, 1.0, 2.0])
    )
    assert len(t.ordinates) == 3  # tie collapsed
    inv = kr.invert_table(t)
    assert inv(1.0) == 1.0  # left endpoint of the flat span


@given(s_max=st.floats(min_value=3.0, max_value=50.0))
@settings(max_examples=25, deadline=None)
def test_z_round_trip_property(s_max):
    spec = _spec(0.5, kr.power_pair(2.0, 2.0))
    tab = kr.compute_Z(spec, s_max)
    inv = kr.invert_table(tab)
    for x in np.linspace(1.1, s_max * 0.95, 7):
        assert abs(inv(tab(float(x))) - x) < 1e-6 * (1 + x)


# ---------------------------------------------------------------------------
# KO


def test_ko_closed_forms():
    # f(t,t) = t, a = 1: KO(r) = sqrt(2) ln r
    spec1 = _spec(1.0, kr.power_pair(1.0, 1.0))
    tab1 = kr.compute_KO(spec1, 1, 40.0)
    assert tab1(1.0) == 0.0
    assert abs(tab1(float(np.e)) - math.sqrt(2.0)) < 1e-3

    # f(t,t) = t^3, a = 1: KO(r) = 2 (1 - 1/r), KO(2) = 1
    spec3 = _spec(1.0, kr.power_pair(3.0, 3.0))
    tab3 = kr.compute_KO(spec3, 1, 40.0)
    assert abs(tab3(2.0) - 1.0) < 1e-3


def test_ko_divergence_law():
    """classify_limit(KO) divergent iff gamma <= 1, finite beyond."""
    verdicts = {}
    for gam in (0.5, 1.0, 3.0):
        spec = _spec(1.0, kr.power_pair(gam, gam))
        verdicts[gam] = ko_auto(spec, 1).limit()
    assert verdicts[0.5].is_divergent
    assert verdicts[1.0].is_divergent
    assert verdicts[3.0].is_finite
    assert abs(verdicts[3.0].estimate - 2.0) < 1e-3


def test_z_range_law():
    for gam, finite in ((0.5, False), (1.0, False), (2.0, True)):
        spec = _spec(0.5, kr.power_pair(gam, gam))
        lim = z_auto(spec).limit()
        assert lim.is_finite == finite
    # the finite value: Z(inf) = int_1^inf dt/(2 t^2) = 1/2
    lim2 = z_auto(_spec(0.5, kr.power_pair(2.0, 2.0))).limit()
    assert abs(lim2.estimate - 0.5) < 1e-3


# ---------------------------------------------------------------------------
# radial functionals


def test_compute_p_closed_form():
    spec = _spec(1.0, kr.power_pair(1.0, 1.0))
    g = kr.make_grid(1.0, 1024)
    p = kr.compute_P(spec, 1, g)
    assert p.values[0] == 0.0
    assert abs(p.at_end() - 1.0 / 6.0) < 1e-5
    assert np.all(np.diff(p.values) >= 0)


def test_compute_p_zero_weight():
    spec = kr.ProblemSpec(3, 1, 1, (kr.Constant(0.0), ONE), kr.power_pair(1, 1))
    g = kr.make_grid(2.0, 64)
    np.testing.assert_array_equal(kr.compute_P(spec, 1, g).values, 0.0)


def test_compute_p_integrable_tail():
    # p = (1+r)^-4, N=3: P(inf) finite with tail ~ (1/3)/r, so
    # P(40) - P(20) ~ (1/3)(1/20 - 1/40) = 1/120
    spec = kr.ProblemSpec(3, 1, 1, (kr.PowerDecay(1.0, 4.0), ONE), kr.power_pair(1, 1))
    p20 = kr.compute_P(spec, 1, kr.make_grid(20.0, 2048)).at_end()
    p40 = kr.compute_P(spec, 1, kr.make_grid(40.0, 4096)).at_end()
    assert p40 > p20
    # strictly below 1/120 because the inner integral is still short of 1/3
    assert 0.8 < (p40 - p20) * 120.0 < 1.0


def test_pbar_chained_closed_form():
    """Every stage of the Pbar chain against hand-evaluated values.

    power_pair(1,1), a=0.5, p==1, N=3, r=1: P1+P2 = 1/3, Z^-1(1/3) =
    e^(2/3), M = 2, factor = sqrt(2 (1 + e^(2/3))), tail integral = 1.
    """
    spec = _spec(0.5, kr.power_pair(1.0, 1.0))
    g = kr.make_grid(1.0, 2048)
    pb = kr.compute_Pbar(spec, 1, g, z_auto(spec))
    expected = math.sqrt(2.0 * (1.0 + math.exp(2.0 / 3.0)))
    assert abs(pb.at_end() - expected) < 2e-3
    assert np.all(np.diff(pb.values) >= 0)


def test_pbar_zero_weights():
    spec = kr.ProblemSpec(3, 0.5, 0.5, (kr.Constant(0.0), kr.Constant(0.0)),
                          kr.power_pair(1.0, 1.0))
    g = kr.make_grid(2.0, 64)
    np.testing.assert_array_equal(kr.compute_Pbar(spec, 1, g, z_auto(spec)).values, 0.0)


def test_pbar_eps_requires_monotone_radius():
    spec = _spec(0.5, kr.power_pair(1.0, 1.0))
    g = kr.make_grid(2.0, 64)
    with pytest.raises(kr.MonotoneRadiusNotFound):
        kr.compute_Pbar_eps(spec, 1, g, None, z_auto(spec))


def test_pbar_eps_zero_below_radius():
    dec = kr.PowerDecay(0.01, 4.0)
    spec = kr.ProblemSpec(3, 1, 1, (dec, dec), kr.power_pair(3.0, 3.0))
    g = kr.make_grid(10.0, 512)
    r_mono = kr.detect_monotone_radius(dec, 3, g)
    assert r_mono == 0.0
    pe = kr.compute_Pbar_eps(spec, 1, g, 2.0, z_auto(spec))
    nodes = g.nodes
    np.testing.assert_array_equal(pe.values[nodes < 2.0], 0.0)
    assert np.all(np.diff(pe.values) >= -1e-15)


def test_zrange_exhausted_when_z_is_finite():
    # gamma=3 makes Z(inf) finite while P1+P2 keeps growing: the Pbar
    # argument escapes the attainable range on a wide enough grid.
    spec = kr.ProblemSpec(3, 1, 1, (ONE, ONE), kr.power_pair(3.0, 3.0))
    g = kr.make_grid(3.0, 256)
    with pytest.raises(kr.ZRangeExhausted):
        kr.compute_Pbar(spec, 1, g, z_auto(spec))


def test_lower_bounds_closed_form():
    # sinh case: integrand p1 f1(1, 1 + P2(t)) = 1 + t^2/6,
    # so Plower(r) = r^2/6 + r^4/120
    spec = _spec(1.0, kr.power_pair(1.0, 1.0))
    g = kr.make_grid(1.0, 1024)
    pl, ql = kr.compute_lower_bounds(spec, g)
    expected = 1.0 / 6.0 + 1.0 / 120.0
    assert abs(pl.at_end() - expected) < 1e-5
    np.testing.assert_allclose(pl.values, ql.values)  # symmetric problem


def test_lower_bounds_zero_weight_sides():
    spec = kr.ProblemSpec(3, 1, 1, (kr.Constant(0.0), ONE), kr.power_pair(1, 1))
    g = kr.make_grid(2.0, 64)
    pl, ql = kr.compute_lower_bounds(spec, g)
    np.testing.assert_array_equal(pl.values, 0.0)
    assert ql.at_end() > 0


# ---------------------------------------------------------------------------
# limit classification


def test_classify_limit_synthetic_tails():
    pol = kr.TailPolicy()
    fin = kr.classify_limit(lambda r: 5.0 - 2.0 / r, pol)
    assert fin.is_finite and abs(fin.estimate - 5.0) < 1e-3

    assert kr.classify_limit(lambda r: 0.3 * r**0.5, pol).is_divergent
    assert kr.classify_limit(lambda r: 0.7 * np.log(r), pol).is_divergent

    const = kr.classify_limit(lambda r: 3.25, pol)
    assert const.is_finite and const.estimate == 3.25


@given(
    c=st.floats(min_value=0.1, max_value=100.0),
    a=st.floats(min_value=0.01, max_value=10.0),
)
@settings(max_examples=40, deadline=None)
def test_classify_limit_finite_tail_property(c, a):
    lim = kr.classify_limit(lambda r: c - a / r, kr.TailPolicy())
    assert lim.is_finite
    assert abs(lim.estimate - c) < 1e-2 * (1 + c)


@given(p=st.floats(min_value=0.3, max_value=3.0), a=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=40, deadline=None)
def test_classify_limit_power_growth_property(p, a):
    lim = kr.classify_limit(lambda r: a * r**p, kr.TailPolicy())
    assert lim.is_divergent


def test_classify_limit_evaluation_failure_is_inconclusive():
    def broken(r):
        raise kr.BeyondRange("table exhausted")

    lim = kr.classify_limit(broken, kr.TailPolicy())
    assert lim.is_inconclusive
    assert "table exhausted" in lim.note


# ---------------------------------------------------------------------------
# monotone radius and eps tails


def test_detect_monotone_radius_cases():
    g = kr.make_grid(12.0, 256)
    assert kr.detect_monotone_radius(lambda r: np.ones_like(np.asarray(r, float)), 3, g) == 0.0
    # (1+r)^-4 with N=3: r^4 (1+r)^-4 is increasing everywhere
    assert kr.detect_monotone_radius(kr.PowerDecay(1.0, 4.0), 3, g) == 0.0
    # e^-r: r^4 e^-r decreases beyond r=4, so no suffix qualifies
    assert kr.detect_monotone_radius(lambda r: np.exp(-np.asarray(r, float)), 3, g) is None


def test_detect_monotone_radius_mid_grid_violation():
    # bump weight: g = r^4 p(r) dips at the bump edge then recovers
    def w(r):
        r = np.asarray(r, dtype=float)
        return 1.0 + 40.0 * np.exp(-((r - 2.0) ** 2) * 8.0)

    g = kr.make_grid(12.0, 512)
    r_mono = kr.detect_monotone_radius(w, 3, g)
    assert r_mono is not None
    assert 2.0 < r_mono < 6.0
    vals = g.nodes ** 4 * w(g.nodes)
    tail = vals[g.nodes >= r_mono]
    assert np.all(np.diff(tail) >= -1e-10 * tail[:-1])


def test_eps_tail_integral_closed_form():
    # p(t) = t^-4, eps = 0.5, r_lo = 1: int_1^r t^-2.5 dt -> (2/3)(1 - r^-1.5)
    g = kr.make_grid(64.0, 4096)
    tail = kr.eps_tail_integral(lambda r: np.asarray(r, float) ** -4.0, 0.5, 1.0, g)
    np.testing.assert_array_equal(tail[g.nodes < 1.0], 0.0)
    expected = (2.0 / 3.0) * (1.0 - 64.0**-1.5)
    assert abs(tail[-1] - expected) < 1e-4


# ---------------------------------------------------------------------------
# profile assembly


def test_build_profile_field_coverage(sinh_profile):
    prof = sinh_profile
    assert set(prof.limits) == {
        "KO1", "KO2", "Pbar1", "Pbar2", "Plower", "Qlower",
        "Pbar1_eps", "Pbar2_eps",
    }
    assert prof.r_monotone == 0.0
    assert prof.plower.values[0] == 0.0
    assert np.all(np.diff(prof.p1_tab.values) >= 0)
    assert prof.pbar1.complete  # Z covers the whole grid here
    # KO1 and KO2 diverge for the linear pair
    assert prof.limits["KO1"].is_divergent
    assert prof.limits["KO2"].is_divergent


def test_build_profile_masks_pbar_when_z_range_ends():
    # gamma=3 with unit weights: Z(inf) finite, argument escapes mid-grid
    spec = kr.ProblemSpec(3, 1, 1, (ONE, ONE), kr.power_pair(3.0, 3.0))
    g = kr.make_grid(3.0, 256)
    prof = kr.build_profile(spec, g)
    assert not prof.pbar1.complete
    assert np.any(prof.pbar1.mask) and not np.all(prof.pbar1.mask)
    assert np.all(np.isnan(prof.pbar1.values[~prof.pbar1.mask]))
    assert prof.limits["Pbar1"].is_inconclusive


def test_build_profile_eps_tables_absent_without_monotone_radius():
    # (1+r)^-5 decays faster than r^4 grows: r^4 p(r) ~ 1/r never settles
    w = kr.PowerDecay(1.0, 5.0)
    spec = kr.ProblemSpec(3, 1, 1, (w, w), kr.power_pair(1.0, 1.0))
    g = kr.make_grid(12.0, 256)
    prof = kr.build_profile(spec, g)
    assert prof.r_monotone is None
    assert prof.pbar1_eps is None
    assert prof.limits["Pbar1_eps"].is_inconclusive
    assert "nondecreasing" in prof.limits["Pbar1_eps"].note
