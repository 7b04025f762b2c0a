import math

import numpy as np
import pytest

from mdimlab.errors import ConfigError, EstimationError
from mdimlab.estimate import (ScaleGrid, grid_separated_count, hausdorff_metric_ordering, katok_profile,
                              mdim_hausdorff_estimate, mdim_metric_estimate, minkowski_dim_estimate,
                              ols_slope, resolution_floor)
from mdimlab.metric import power
from mdimlab.packing import CountQuery, max_separated
from mdimlab.systems import Alphabet, FiniteSystem, WeightFamily, WeightedPointSet, make_full_shift
from mdimlab.verify import product_matrix

import oracles

GRID = ScaleGrid((0.4, 0.3, 0.2, 0.1), (1, 2, 3, 4))
TWO = Alphabet.explicit([[0, 0.5], [0.5, 0]])


def test_grid_validation():
    with pytest.raises(ConfigError):
        ScaleGrid((0.1, 0.2, 0.05, 0.01), (1, 2, 3, 4))
    with pytest.raises(ConfigError):
        ScaleGrid((0.4, 0.3, 0.2), (1, 2, 3, 4))
    with pytest.raises(ConfigError):
        ScaleGrid((0.4, 0.3, 0.2, 0.1), (1, 3, 2, 4))
    g = ScaleGrid.geometric(1 / 16, 1 / 64, 5, (1, 2, 3, 4, 5))
    assert g.epsilons[0] == pytest.approx(1 / 16) and g.epsilons[-1] == pytest.approx(1 / 64)
    assert g.tail() == [2, 3, 4]
    assert g.mapped(power(0.5)).epsilons[0] == pytest.approx(0.25)


def test_ols_slope_exact_line():
    m, c, r = ols_slope([1, 2, 3], [2, 4, 6])
    assert m == pytest.approx(2) and abs(c) < 1e-12 and r < 1e-12


def test_resolution_floor_enforced():
    sys = make_full_shift(Alphabet.interval(1 / 16), WeightFamily(0.5))
    assert resolution_floor(sys) == pytest.approx(0.125)
    with pytest.raises(ConfigError):
        mdim_metric_estimate(sys, ScaleGrid.geometric(1 / 16, 1 / 64, 5, (1, 2, 3, 4)), "sampled")


def test_fixed_point_system_is_zero():
    f = FiniteSystem(np.zeros((1, 1)), (0,))
    rep = mdim_metric_estimate(f, GRID, "exact")
    assert rep.upper == pytest.approx(0, abs=1e-12) and rep.lower == pytest.approx(0, abs=1e-12)


def test_two_symbol_full_shift_zero_slope():
    sys = make_full_shift(TWO, WeightFamily(0.5, radius=2))
    rep = mdim_metric_estimate(sys, GRID, "exact")
    assert rep.direction_flag() == "exact"
    assert abs(rep.upper) < 1e-9 and abs(rep.lower) < 1e-9


def test_metric_estimate_counts_are_exact_counts():
    sys = make_full_shift(TWO, WeightFamily(0.5, radius=1))
    rep = mdim_metric_estimate(sys, GRID, "exact")
    # n=2, matched: 4 configurations
    X = sys.with_side(2).enumerate()
    D = sys.with_side(2).pairwise_bowen(X, [(0,), (1,)])
    for i, e in enumerate(GRID.epsilons):
        assert rep.raw[(i, 1)]["s"] == oracles.separated(D, rep.raw[(i, 1)]["eps_used"])


def test_sampled_deterministic_and_estimate_direction():
    sys = make_full_shift(Alphabet.interval(1 / 256), WeightFamily(0.5))
    g = ScaleGrid.geometric(1 / 16, 1 / 64, 4, (1, 2, 3, 4))
    a = mdim_metric_estimate(sys, g, "sampled", N=300, centers=4, seed=3)
    b = mdim_metric_estimate(sys, g, "sampled", N=300, centers=4, seed=3)
    assert np.array_equal(a.values["r"], b.values["r"])
    assert a.direction_flag() == "estimate"


def test_snowflake_scales_sampled_estimate_exactly():
    sys = make_full_shift(Alphabet.interval(1 / 256), WeightFamily(0.5))
    g = ScaleGrid.geometric(1 / 16, 1 / 64, 4, (1, 2, 3, 4))
    a = mdim_metric_estimate(sys, g, "sampled", N=300, centers=4, seed=1)
    t = power(0.5)
    b = mdim_metric_estimate(sys.with_transform(t), g.mapped(t), "sampled", N=300, centers=4, seed=1)
    assert b.upper == pytest.approx(2 * a.upper, rel=1e-9)


def test_hausdorff_single_point_and_two_symbols():
    one = FiniteSystem(np.zeros((1, 1)), (0,))
    rep = mdim_hausdorff_estimate(one, GRID, 0.1)
    assert np.all(rep.values["H"] < 1e-5)
    sys = make_full_shift(TWO, WeightFamily.explicit([((0,), 1.0)]))
    g = ScaleGrid((0.4, 0.3, 0.2, 0.1), (1, 2, 3, 4))
    rep = mdim_hausdorff_estimate(sys, g, 0.1, matched=True)
    assert rep.values["H"][1, 0] == pytest.approx(math.log(2) / math.log(10), abs=1e-6)


def test_hausdorff_below_cover_ratio():
    sys = make_full_shift(Alphabet.explicit([[0, .3, .5], [.3, 0, .4], [.5, .4, 0]]), WeightFamily(0.4, radius=1))
    rep = mdim_hausdorff_estimate(sys, GRID, 0.05, max_points=9, matched=True)
    o = hausdorff_metric_ordering(rep)
    assert o["hausdorff"] <= o["metric"] + 1e-9


def test_minkowski_grid_matches_analytic_counts():
    eps = [0.5, 0.25, 0.125, 0.0625, 1 / 32]
    rep = minkowski_dim_estimate(Alphabet.interval(1 / 64), eps)
    want = [oracles.grid_count(64, e) for e in eps]
    assert list(rep.counts) == want == [grid_separated_count(1 / 64, e) for e in eps]
    slope, _, _ = ols_slope(np.abs(np.log(eps)), np.log(want))
    assert rep.slope == pytest.approx(slope)


def test_minkowski_constant_count_slope_zero():
    D = 0.5 * (1 - np.eye(4))
    rep = minkowski_dim_estimate(D, [0.4, 0.3, 0.2, 0.1])
    assert rep.counts == (4, 4, 4, 4) and abs(rep.slope) < 1e-12


def test_minkowski_product_grid_multiplies():
    x = np.arange(9) / 8
    D = np.abs(x[:, None] - x[None, :])
    P = product_matrix(D, D)
    for e in (0.3, 0.2, 0.13):
        a = max_separated(None, D, CountQuery(e)).value
        assert max_separated(None, P, CountQuery(e)).value == a * a


def test_minkowski_rejects_below_resolution():
    with pytest.raises(ConfigError):
        minkowski_dim_estimate(Alphabet.interval(1 / 16), [0.2, 0.1, 0.05])


def test_katok_profile_limits():
    sys = make_full_shift(TWO, WeightFamily(0.4, radius=1))
    pm = lambda pts: WeightedPointSet.point_mass(len(pts), 0)
    prof = katok_profile(sys, pm, GRID, 0.5, matched=True)
    assert np.all(prof.katok == 0)
    uni = lambda pts: WeightedPointSet.uniform(len(pts))
    prof = katok_profile(sys, uni, GRID, 1e-9, matched=True)
    assert np.allclose(prof.katok, prof.spanning) and prof.dominated


def test_estimation_error_when_unusable():
    from mdimlab.estimate import DimensionReport
    rep = DimensionReport("metric", "exact", (0.4, 0.3, 0.2, 0.1), (1, 2, 3, 4), (1, 2, 3, 4),
                          {"r": np.full((4, 4), np.nan)}, {"r": [["failed"] * 4] * 4}, 0.5, "r")
    with pytest.raises(EstimationError):
        rep.slopes()
