import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_front, grid_argmax
from ptload.errors import AllBandsUnusable, EmptyCloud, ValidationError, ZeroBaseline
from ptload.frontier import (
    dominates,
    efficient_frontier,
    improvement_ratio,
    refine_max_mean,
    select_max_mean,
    select_min_variance,
    water_filling,
)
from ptload.interference import InterferenceMarginal, InterferenceModel, sample_interference
from ptload.portfolio import (
    EvaluatedPortfolio,
    Portfolio,
    ThroughputStats,
    evaluate_many,
    evaluate_portfolio,
    sample_portfolios,
    single_band_portfolio,
)
from ptload.radio import LinkScenario, SubbandSpec


def point(i, sd, mean):
    stats = ThroughputStats(mean, sd * sd, sd, (mean,), (sd,), ((1.0,),))
    return EvaluatedPortfolio(i, Portfolio((1.0,)), stats)


def coords(points):
    return [(e.sd, e.mean) for e in points]


def test_dominated_point_dropped():
    f = efficient_frontier([point(0, 1, 5), point(1, 2, 4)])
    assert coords(f.frontier) == [(1, 5)]


def test_tradeoff_keeps_both():
    f = efficient_frontier([point(0, 2, 6), point(1, 1, 5)])
    assert coords(f.frontier) == [(1, 5), (2, 6)]
    assert coords([select_max_mean(f)]) == [(2, 6)]
    assert coords([select_min_variance(f)]) == [(1, 5)]


def test_singleton():
    f = efficient_frontier([point(3, 1, 1)])
    assert select_max_mean(f).id == 3 == select_min_variance(f).id


def test_empty_cloud():
    with pytest.raises(EmptyCloud):
        efficient_frontier([])


def test_duplicates_keep_lowest_id():
    f = efficient_frontier([point(5, 1, 5), point(2, 1, 5), point(9, 1, 5)])
    assert [e.id for e in f.frontier] == [2]


def test_equal_sd_lower_mean_is_dominated():
    f = efficient_frontier([point(0, 1, 4), point(1, 1, 5)])
    assert [e.id for e in f.frontier] == [1]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=1, max_size=60))
def test_frontier_matches_brute_force(pts):
    cloud = [point(i, float(s), float(m)) for i, (s, m) in enumerate(pts)]
    f = efficient_frontier(cloud)
    expected = brute_force_front([(float(m), float(s)) for s, m in pts])
    assert sorted(e.id for e in f.frontier) == expected
    sds = [e.sd for e in f.frontier]
    means = [e.mean for e in f.frontier]
    assert sds == sorted(sds)
    assert all(a < b for a, b in zip(means, means[1:]))
    assert [e.id for e in efficient_frontier(f.frontier).frontier] == [e.id for e in f.frontier]


@pytest.fixture(scope="module")
def stochastic_cloud():
    link = LinkScenario([SubbandSpec(96e6, g, 1e-3) for g in (5.0, 1.0, 12.0)], 1.0)
    model = InterferenceModel(
        [InterferenceMarginal.lognormal(-3.3, 2.2), InterferenceMarginal.lognormal(-2.7, 1.5), InterferenceMarginal.constant(0.05)],
        np.eye(3),
    )
    samples = sample_interference(model, 2000, 3)
    cloud = evaluate_many(sample_portfolios(3, 800, 3), link, samples)
    cloud += evaluate_many([single_band_portfolio(3, i) for i in range(3)], link, samples, first_id=len(cloud))
    return link, samples, cloud


def test_no_cloud_point_dominates_frontier(stochastic_cloud):
    _, _, cloud = stochastic_cloud
    f = efficient_frontier(cloud)
    for fp in f.frontier:
        assert not any(dominates(c, fp) for c in cloud)
    # every non-frontier point is dominated by some frontier point
    ids = f.frontier_ids
    for c in cloud:
        if c.id not in ids:
            assert any(dominates(fp, c) or (fp.mean == c.mean and fp.sd == c.sd) for fp in f.frontier)


def test_inserting_dominated_point(stochastic_cloud):
    _, _, cloud = stochastic_cloud
    f = efficient_frontier(cloud)
    top = f.frontier[len(f.frontier) // 2]
    extra = point(10**6, top.sd + 1.0, top.mean - 1.0)
    assert efficient_frontier(list(cloud) + [extra]).frontier_ids == f.frontier_ids


def test_constant_band_is_min_sd(stochastic_cloud):
    _, _, cloud = stochastic_cloud
    f = efficient_frontier(cloud)
    m = select_min_variance(f)
    assert m.portfolio.weights == (0.0, 0.0, 1.0)
    assert m.sd == 0.0


def test_all_constant_tie_break(symmetric_link, quiet_samples):
    cloud = evaluate_many([Portfolio((1, 0, 0)), Portfolio((0, 1, 0)), Portfolio((0, 0, 1))], symmetric_link, quiet_samples)
    f = efficient_frontier(cloud)
    assert select_min_variance(f).id == 0
    assert f.min_sd.id == 0 and f.max_mean.id == 0


def test_refine_symmetric_from_corner(symmetric_link, quiet_samples):
    p = refine_max_mean(symmetric_link, quiet_samples, Portfolio((1, 0, 0)))
    np.testing.assert_allclose(p.weights, [1 / 3] * 3, atol=1e-2)


def test_refine_no_regression_at_optimum(symmetric_link, quiet_samples):
    start = Portfolio((1 / 3, 1 / 3, 1 / 3))
    p = refine_max_mean(symmetric_link, quiet_samples, start)
    assert evaluate_portfolio(p, symmetric_link, quiet_samples).mean >= evaluate_portfolio(start, symmetric_link, quiet_samples).mean


def two_band():
    link = LinkScenario([SubbandSpec(1.0, 1.0, 1.0), SubbandSpec(1.0, 1.0, 2.0)], 3.0)
    model = InterferenceModel.independent([InterferenceMarginal.constant(0.0)] * 2)
    return link, model


def test_refine_two_band_matches_grid_oracle():
    link, model = two_band()
    samples = sample_interference(model, 1, 0)
    # brute-force grid at 1e-4 resolution gives [0.6667, 0.3333]
    grid_w, _ = grid_argmax(3.0, [1, 1], [1, 1], [1, 2], [0, 0], 1e-4)
    p = refine_max_mean(link, samples, Portfolio((0.5, 0.5)))
    np.testing.assert_allclose(p.weights, [2 / 3, 1 / 3], atol=1e-3)
    np.testing.assert_allclose(p.weights, grid_w, atol=1e-3)


def test_refine_tolerance_must_be_positive(symmetric_link, quiet_samples):
    with pytest.raises(ValidationError):
        refine_max_mean(symmetric_link, quiet_samples, Portfolio((1, 0, 0)), tol=0)


def test_refine_beats_sampling(stochastic_cloud):
    link, samples, cloud = stochastic_cloud
    f = efficient_frontier(cloud)
    p = refine_max_mean(link, samples, f.max_mean.portfolio, tol=1e-6)
    assert evaluate_portfolio(p, link, samples).mean >= f.max_mean.mean


def test_water_filling_examples():
    link, model = two_band()
    np.testing.assert_allclose(water_filling(link, model).weights, [2 / 3, 1 / 3], rtol=1e-12)
    low = LinkScenario(link.subbands, 1.0)
    assert water_filling(low, model).weights == (1.0, 0.0)
    sym = LinkScenario([SubbandSpec(96e6, 1, 1)] * 4, 2.0)
    np.testing.assert_allclose(
        water_filling(sym, InterferenceModel.independent([InterferenceMarginal.constant(0.0)] * 4)).weights, [0.25] * 4
    )


def test_water_filling_grid_oracle_low_power():
    w, _ = grid_argmax(1.0, [1, 1], [1, 1], [1, 2], [0, 0], 1e-4)
    np.testing.assert_allclose(w, [1.0, 0.0], atol=1e-4)


def test_water_filling_unequal_bandwidths_against_grid():
    link = LinkScenario([SubbandSpec(2.0, 1.0, 0.5), SubbandSpec(1.0, 3.0, 1.0), SubbandSpec(1.5, 0.7, 0.2)], 1.5)
    model = InterferenceModel.independent([InterferenceMarginal.constant(x) for x in (0.1, 0.0, 0.3)])
    grid_w, _ = grid_argmax(1.5, [2.0, 1.0, 1.5], [1.0, 3.0, 0.7], [0.5, 1.0, 0.2], [0.1, 0.0, 0.3], 1e-3)
    np.testing.assert_allclose(water_filling(link, model).weights, grid_w, atol=1.5e-3)


def test_water_filling_zero_gain_band():
    link = LinkScenario([SubbandSpec(1, 0.0, 1), SubbandSpec(1, 1.0, 1)], 1.0)
    model = InterferenceModel.independent([InterferenceMarginal.constant(0.0)] * 2)
    assert water_filling(link, model).weights == (0.0, 1.0)
    dead = LinkScenario([SubbandSpec(1, 0.0, 1)] * 2, 1.0)
    with pytest.raises(AllBandsUnusable):
        water_filling(dead, model)


def test_water_filling_needs_constant_interference():
    link, _ = two_band()
    with pytest.raises(ValidationError):
        water_filling(link, InterferenceModel.independent([InterferenceMarginal.gamma(1, 1)] * 2))


def test_refine_matches_water_filling_from_random_starts():
    rng = np.random.default_rng(17)
    link = LinkScenario([SubbandSpec(1e6, float(g), float(n)) for g, n in zip(rng.uniform(0.5, 3, 4), rng.uniform(0.1, 1, 4))], 2.0)
    model = InterferenceModel.independent([InterferenceMarginal.constant(float(x)) for x in rng.uniform(0, 0.5, 4)])
    samples = sample_interference(model, 1, 0)
    target = evaluate_portfolio(water_filling(link, model), link, samples).mean
    for start in sample_portfolios(4, 10, 5):
        got = evaluate_portfolio(refine_max_mean(link, samples, start), link, samples).mean
        assert abs(got - target) <= 1e-6 * target


@pytest.mark.parametrize(
    "cand, base, expected", [(1350e6, 705e6, 91.48936170212765), (288e6, 192e6, 50.0), (7.0, 7.0, 0.0)]
)
def test_improvement_ratio(cand, base, expected):
    assert improvement_ratio(cand, base) == pytest.approx(expected, rel=1e-12)


def test_improvement_ratio_reference_rounds_to_91():
    assert round(improvement_ratio(1350e6, 705e6)) == 91


def test_zero_baseline():
    with pytest.raises(ZeroBaseline):
        improvement_ratio(1.0, 0.0)
