import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdimlab.errors import ConfigError, InvalidTransformError
from mdimlab.group import box
from mdimlab.metric import (MetricSpec, MetricTransform, bowen_commutes_with_transform, bowen_distance,
                            exponent_range, hybrid, log_power, power, product_metric, sampled,
                            uniform_distance, uniform_distance_matrix)
from mdimlab.systems import Alphabet, WeightFamily, make_full_shift

import oracles


def line_metric():
    return MetricSpec(lambda x, y: abs(x - y), 1.0, "line")


def test_bowen_singleton_window_is_base_metric():
    sys = make_full_shift(Alphabet.interval(0.25), WeightFamily(0.5, radius=1), side=3)
    x, y = np.array([0, 1, 4]), np.array([2, 1, 0])
    assert sys.distance(x, y, [(0,)]) == pytest.approx(sys.distance(x, y))


def test_bowen_two_symbol_shifted_pair():
    rho = [[0, 1], [1, 0]]
    A = Alphabet.explicit(rho)
    w = oracles.lambda_items(0.5, 2)
    sys = make_full_shift(A, WeightFamily(0.5, radius=2), side=5)
    x, y = [0, 0, 0, 0, 0], [0, 1, 0, 0, 0]
    d0 = oracles.shift_distance(x, y, rho, w, 5)
    d1 = oracles.shift_distance(x[1:] + x[:1], y[1:] + y[:1], rho, w, 5)
    assert sys.distance(np.array(x), np.array(y), [(0,), (1,)]) == pytest.approx(max(d0, d1), abs=1e-15)


@given(st.lists(st.integers(0, 2), min_size=4, max_size=4), st.lists(st.integers(0, 2), min_size=4, max_size=4),
       st.lists(st.integers(0, 3), min_size=1, max_size=4, unique=True))
def test_bowen_matches_loop_oracle(x, y, F):
    rho = [[0, .3, .5], [.3, 0, .4], [.5, .4, 0]]
    sys = make_full_shift(Alphabet.explicit(rho), WeightFamily(0.4, radius=2), side=4)
    want = oracles.bowen_shift(x, y, rho, oracles.lambda_items(0.4, 2), 4, F)
    got = sys.distance(np.array(x), np.array(y), [(h,) for h in F])
    assert got == pytest.approx(want, abs=1e-14)


@given(st.lists(st.integers(0, 4), min_size=5, max_size=5), st.lists(st.integers(0, 4), min_size=5, max_size=5),
       st.integers(1, 4), st.integers(1, 4))
def test_bowen_monotone_in_window(x, y, a, b):
    sys = make_full_shift(Alphabet.interval(0.25), WeightFamily(0.5, radius=2), side=5)
    F, G = box(min(a, b)), box(max(a, b))
    assert sys.distance(np.array(x), np.array(y), F) <= sys.distance(np.array(x), np.array(y), G) + 1e-15


def test_bowen_distance_generic():
    d = line_metric()
    act = lambda h, x: x * (2 ** h[0])
    assert bowen_distance(act, box(3), d, 0.1, 0.2) == pytest.approx(0.4)


def test_product_metric():
    d = product_metric(line_metric(), line_metric())
    assert d((0.1, 0.2), (0.1, 0.7)) == pytest.approx(0.5)
    assert d((0.0, 0.0), (0.2, 0.5)) == pytest.approx(0.5)


def test_transform_values():
    assert power(0.5)(0.04) == pytest.approx(0.2)
    assert hybrid(0.5, 0.1)(0.04) == pytest.approx(math.sqrt(0.004))
    assert hybrid(0.5, 0.1)(0.2) == 0.2
    assert log_power(0.5)(0.25) == pytest.approx(math.log1p(0.5))


@pytest.mark.parametrize("t", [power(0.3), hybrid(0.5, 0.1), log_power(0.4), sampled([0, 0.5, 1], [0, 0.7, 1])])
def test_inverse_roundtrip(t):
    v = np.linspace(0.001, 0.99, 50)
    assert np.allclose(t.inverse(t(v)), v, atol=1e-12)


def test_transform_validation_rejects_nonsubadditive():
    t = sampled([0, 0.5, 1.0], [0, 0.1, 1.0])
    with pytest.raises(InvalidTransformError):
        t.validate(1.0)
    with pytest.raises(InvalidTransformError):
        power(1.5)
    with pytest.raises(InvalidTransformError):
        hybrid(1.0, 0.1)


@pytest.mark.parametrize("t", [power(0.5), log_power(0.3), hybrid(0.3, 0.2)])
def test_commutation_on_shift_pairs(t):
    sys = make_full_shift(Alphabet.interval(0.125), WeightFamily(0.5, radius=2), side=4)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x, y = rng.integers(0, 9, 4), rng.integers(0, 9, 4)
        lhs, rhs = bowen_commutes_with_transform(t, sys.metric(), lambda h, z: sys.act(h, z), box(3), x, y)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_commutation_rank2():
    sys = make_full_shift(Alphabet.interval(0.25), WeightFamily(0.5, radius=1, rank=2), side=3, rank=2)
    rng = np.random.default_rng(1)
    t = log_power(0.3)
    for _ in range(20):
        x, y = rng.integers(0, 5, 9), rng.integers(0, 5, 9)
        lhs, rhs = bowen_commutes_with_transform(t, sys.metric(), lambda h, z: sys.act(h, z), box(2, 2), x, y)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_uniform_distance():
    d = line_metric()
    assert uniform_distance(d, d, [0.1, 0.4, 0.9]) == 0.0
    D1, D2 = np.array([[0, .5], [.5, 0]]), np.array([[0, .3], [.3, 0]])
    assert uniform_distance_matrix(D1, D2) == pytest.approx(0.2)


@given(st.floats(0.3, 0.8), st.floats(0.05, 0.2))
def test_hybrid_within_two_eps(alpha, eps):
    t = hybrid(alpha, eps)
    v = np.linspace(0, 1, 2001)
    assert np.max(np.abs(t(v) - v)) < 2 * eps


def test_exponent_power_and_log_power():
    grid = np.geomspace(0.5, 1e-6, 40)
    e = exponent_range(power(0.7), grid)
    assert abs(e.k_m - 0.7) < 1e-9 and abs(e.k_M - 0.7) < 1e-9
    e = exponent_range(log_power(0.4), grid)
    assert abs(e.k_m - 0.4) < 0.02 and abs(e.k_M - 0.4) < 0.02
    assert exponent_range(power(1.0), grid).k_M == pytest.approx(1.0)


def test_exponent_grid_validation():
    with pytest.raises(ConfigError):
        exponent_range(power(0.5), [0.5, 0.1])
    with pytest.raises(ConfigError):
        exponent_range(power(0.5), np.geomspace(1e-6, 0.5, 10))


def test_transform_roundtrip_dict():
    for t in (power(0.5), hybrid(0.3, 0.1), log_power(0.2), sampled([0, 1], [0, 0.5])):
        assert MetricTransform.from_dict(t.to_dict()) == t
