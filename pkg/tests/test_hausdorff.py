import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdimlab.errors import ConfigError, ResourceError
from mdimlab.hausdorff import (HausdorffQuery, ball_dim_at_scale, closed_form_separated, dim_at_scale,
                               hausdorff_measure_at_scale, subset_diameters)

import oracles
from strategies import metric_matrices

LOG2_10 = math.log(2) / math.log(10)


def H(D, s, eps, floor=0.0, mode="exact"):
    return hausdorff_measure_at_scale(None, D, HausdorffQuery(s, eps, floor=floor, mode=mode))


def test_measure_examples(two_points):
    assert H(two_points, 0.7, 0.3) == 0.0
    assert H(two_points, 0.0, 0.3) == 2.0
    for s in (0.0, 0.5, 1.3):
        assert H(two_points, s, 0.3, 0.1) == pytest.approx(2 * 0.1 ** s, rel=1e-12)


def test_dim_examples(two_points):
    assert dim_at_scale(None, two_points, 0.3, floor=0.0).value < 1e-5
    r = dim_at_scale(None, two_points, 0.3, floor=0.1)
    assert abs(r.value - LOG2_10) <= r.width
    for m in (3, 5):
        D = 0.5 * (1 - np.eye(m))
        assert dim_at_scale(None, D, 0.3, floor=0.1).value == pytest.approx(closed_form_separated(m, 0.1), abs=1e-6)


def test_ball_examples(two_points):
    assert ball_dim_at_scale(None, np.zeros((1, 1)), 0.3, floor=0.1).value < 1e-5
    assert ball_dim_at_scale(None, two_points, 0.3, floor=0.1).value == pytest.approx(LOG2_10, abs=1e-6)


def test_subset_diameters():
    x = np.array([0.0, 0.2, 0.7])
    D = np.abs(x[:, None] - x[None, :])
    d = subset_diameters(D)
    assert d[0b011] == pytest.approx(0.2) and d[0b111] == pytest.approx(0.7) and d[0b100] == 0


@given(metric_matrices(max_n=6), st.floats(0.0, 2.0), st.floats(0.1, 0.9), st.floats(0.0, 0.3))
def test_measure_matches_oracle(D, s, eps, floor):
    want = oracles.hausdorff_content(D, s, eps, floor)
    assert H(D, s, eps, floor) == pytest.approx(want, rel=1e-9, abs=1e-300)


@given(metric_matrices(max_n=6), st.floats(0.1, 0.9), st.floats(0.01, 0.3))
def test_greedy_is_upper_bound(D, eps, floor):
    for s in (0.0, 0.5, 1.5):
        assert H(D, s, eps, floor, "greedy") >= H(D, s, eps, floor) * (1 - 1e-12)


@given(metric_matrices(max_n=6), st.floats(0.1, 0.9), st.floats(0.01, 0.3))
def test_ball_variant_dominates(D, eps, floor):
    a = ball_dim_at_scale(None, D, eps, floor=floor)
    b = dim_at_scale(None, D, eps, floor=floor)
    assert a.value >= b.value - 2e-6


@pytest.mark.parametrize("seed", range(5))
def test_dim_matches_bisection_oracle(seed):
    rng = np.random.default_rng(seed)
    from mdimlab.instances import random_metric
    D = random_metric(5, rng) * 0.5
    got = dim_at_scale(None, D, 0.3, floor=0.05)
    assert got.value == pytest.approx(oracles.dim_at_scale(D, 0.3, 0.05), abs=1e-6)


def test_limits_and_validation(two_points):
    with pytest.raises(ConfigError):
        HausdorffQuery(0.5, 1.5)
    with pytest.raises(ConfigError):
        HausdorffQuery(0.5, 0.3, floor=1.0)
    with pytest.raises(ResourceError):
        dim_at_scale(None, np.zeros((20, 20)), 0.3, exact_limit=14)
    assert dim_at_scale(None, np.zeros((20, 20)), 0.3, mode="greedy").value < 1e-5


def test_phi_below_h0(two_points):
    r = dim_at_scale(None, two_points, 0.3, phi=5.0, floor=0.1)
    assert r.below_phi and r.value == 0.0
