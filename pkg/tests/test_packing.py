import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdimlab.errors import ConfigError, ResourceError
from mdimlab.group import box
from mdimlab.instances import random_finite_system, random_metric
from mdimlab.packing import (CountQuery, count_chain, counts_table, katok_spanning, max_separated, min_cover,
                             min_spanning, untie_epsilon)
from mdimlab.systems import WeightedPointSet

import oracles
from strategies import line_points, metric_matrices


def q(eps, **kw):
    return CountQuery(eps, **kw)


def test_separated_line(line4):
    assert max_separated(None, line4, q(0.25)).value == 4
    assert max_separated(None, line4, q(0.35)).value == 2
    assert max_separated(None, np.zeros((1, 1)), q(0.1)).value == 1


def test_spanning_line(line4, two_points):
    assert min_spanning(None, line4, q(0.3)).value == 2
    assert min_spanning(None, line4, q(0.95)).value == 1
    assert min_spanning(None, two_points, q(0.2)).value == 2


def test_cover_examples(line4, two_points):
    assert min_cover(None, two_points, q(0.3)).value == 2
    tri = np.full((3, 3), 0.1) - 0.1 * np.eye(3)
    assert min_cover(None, tri, q(0.2)).value == 1
    assert min_cover(None, line4, q(0.35)).value == 2


def test_chain_examples(line4):
    assert count_chain(None, np.zeros((1, 1)), 0.3).as_tuple() == (1, 1, 1, 1)
    rep = count_chain(None, line4, 0.25)
    want = (oracles.cover(line4, 0.5), oracles.spanning(line4, 0.25),
            oracles.separated(line4, 0.25), oracles.cover(line4, 0.25))
    assert rep.as_tuple() == want == (2, 4, 4, 4)


def test_witnesses_are_valid(line4):
    s = max_separated(None, line4, q(0.25))
    W = s.witness
    assert all(line4[i, j] > 0.25 for i in W for j in W if i != j)
    r = min_spanning(None, line4, q(0.3))
    assert all(min(line4[i, c] for c in r.witness) <= 0.3 + 1e-12 for i in range(4))


@given(metric_matrices(max_n=8, quantum=0.1), st.floats(0.05, 0.6))
def test_counts_match_oracles(D, eps):
    assert max_separated(None, D, q(eps)).value == oracles.separated(D, eps)
    assert min_spanning(None, D, q(eps)).value == oracles.spanning(D, eps)
    assert min_cover(None, D, q(eps)).value == oracles.cover(D, eps)


@given(line_points(max_n=8), st.sampled_from([0.05, 0.1, 0.125, 0.2, 0.25]))
def test_counts_match_oracles_on_line_ties(D, eps):
    # grid points produce exact distance ties at eps
    assert max_separated(None, D, q(eps)).value == oracles.separated(D, eps)
    assert min_spanning(None, D, q(eps)).value == oracles.spanning(D, eps)
    assert min_cover(None, D, q(eps)).value == oracles.cover(D, eps)


@pytest.mark.parametrize("seed", range(50))
def test_chain_random_10_points(seed):
    D = random_metric(10, np.random.default_rng(seed), quantum=0.1)
    assert count_chain(None, D, 0.3).holds


def test_untie_moves_off_ties():
    D = np.array([[0, 0.2], [0.2, 0]])
    e, moved = untie_epsilon(D, 0.1)
    assert moved and e < 0.1 and abs(2 * e - 0.2) > 4e-12


def test_katok_examples(line4):
    mu = WeightedPointSet.uniform(4)
    assert katok_spanning(None, line4, mu, 0.1, 0.3).value == 3
    assert katok_spanning(None, line4, WeightedPointSet.point_mass(4, 2), 0.1, 0.5).value == 1
    # small delta needs every point, the spanning number
    assert katok_spanning(None, line4, mu, 0.3, 1e-6).value == oracles.spanning(line4, 0.3)


@given(metric_matrices(max_n=7), st.floats(0.05, 0.6), st.floats(0.05, 0.9),
       st.lists(st.floats(0.01, 1.0), min_size=7, max_size=7))
def test_katok_matches_oracle(D, eps, delta, w):
    mu = WeightedPointSet.from_weights(w[:len(D)])
    got = katok_spanning(None, D, mu, eps, delta).value
    assert got == oracles.katok(D, mu.array, eps, delta)
    assert got <= oracles.spanning(D, eps)


def test_window_from_system():
    sys = random_finite_system(6, np.random.default_rng(2))
    D = sys.pairwise_bowen(None, box(2))
    a = max_separated(None, D, q(0.3)).value
    b = max_separated(sys.enumerate(), sys, q(0.3, window=tuple(box(2))))
    assert a == b.value


def test_budget_degrade_and_raise():
    D = random_metric(40, np.random.default_rng(0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = max_separated(None, D, q(0.2, node_budget=5))
    assert rep.bound_direction == "lower"
    with pytest.raises(ResourceError):
        max_separated(None, D, q(0.2, node_budget=5, on_budget="raise"))


def test_greedy_directions():
    D = random_metric(12, np.random.default_rng(4))
    t = counts_table(D, 0.3, mode="greedy")
    ex = counts_table(D, 0.3)
    assert t["s"].bound_direction == "lower" and t["s"].value <= ex["s"].value
    assert t["r"].bound_direction == "upper" and t["r"].value >= ex["r"].value
    assert t["cov"].bound_direction == "upper" and t["cov"].value >= ex["cov"].value


def test_sampled_mode_subsamples():
    D = random_metric(30, np.random.default_rng(5))
    rep = max_separated(None, D, q(0.3, mode="sampled", N=10, seed=1))
    assert rep.value <= 10 and rep.bound_direction == "lower"


def test_query_validation():
    with pytest.raises(ConfigError):
        CountQuery(0.0)
    with pytest.raises(ConfigError):
        CountQuery(0.1, mode="sampled")
