from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mdimlab.errors import ConfigError, RangeError
from mdimlab.group import (FiniteWindow, FolnerSequence, boundary_ratio, box, check_tempered,
                           folner_window, window_product)


def els(*xs):
    return tuple((x,) for x in xs)


def test_box_rank1():
    assert folner_window(FolnerSequence.boxes(1), 3).elements == els(0, 1, 2)


def test_box_rank2():
    assert folner_window(FolnerSequence.boxes(2), 2).elements == ((0, 0), (0, 1), (1, 0), (1, 1))


def test_user_windows_pass_through():
    seq = FolnerSequence.from_windows([[0], [0, 5]])
    assert folner_window(seq, 2).elements == els(0, 5)


def test_index_out_of_range():
    with pytest.raises(RangeError):
        folner_window(FolnerSequence.boxes(1, n_max=4), 5)
    with pytest.raises(RangeError):
        folner_window(FolnerSequence.boxes(1), 0)


def test_window_rejects_empty():
    with pytest.raises(ConfigError):
        FiniteWindow(())


@pytest.mark.parametrize("F,g,want", [
    ([0, 1, 2], 1, Fraction(1, 3)),
    ([0, 1, 2, 3], 2, Fraction(1, 2)),
    ([0, 3, 7], 0, Fraction(0)),
])
def test_boundary_ratio(F, g, want):
    assert boundary_ratio(FiniteWindow.of(F), g) == want


@pytest.mark.parametrize("S,F,want", [
    ([0], [0, 1, 2], [0, 1, 2]),
    ([-1, 0, 1], [0, 1], [-1, 0, 1, 2]),
    ([0, 2], [0, 2], [0, 2, 4]),
])
def test_window_product(S, F, want):
    assert window_product(FiniteWindow.of(S), FiniteWindow.of(F)).elements == els(*want)


def brute_tempered(windows):
    worst = Fraction(0)
    for n in range(1, len(windows)):
        Fn = windows[n]
        U = {f - k for m in range(n) for k in windows[m] for f in Fn}
        worst = max(worst, Fraction(len(U), len(Fn)))
    return worst


def test_tempered_z_boxes():
    # F_1 = {0}, F_2 = {0,1}, F_3 = {0,1,2}: worst union is {-1..2} over |F_3| = 3
    got = check_tempered(FolnerSequence.boxes(1, n_max=3), 3)
    assert got == brute_tempered([[0], [0, 1], [0, 1, 2]]) == Fraction(4, 3)


def test_tempered_single_window_repeated():
    W = FiniteWindow.of([0, 2, 3])
    got = check_tempered(FolnerSequence.from_windows([W, W, W]), 3)
    assert got == Fraction(len(window_product(W.inverse(), W)), 3)


def test_tempered_z2_boxes():
    seq = FolnerSequence.boxes(2, n_max=2)
    B1, B2 = box(1, 2), box(2, 2)
    U = {(f[0] - k[0], f[1] - k[1]) for k in B1 for f in B2}
    assert check_tempered(seq, 2) == Fraction(len(U), 4)


@given(st.integers(1, 12), st.integers(-15, 15))
def test_box_boundary_ratio_closed_form(n, g):
    assert boundary_ratio(box(n), g) == Fraction(min(abs(g), n), n)


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.lists(st.integers(-6, 6), min_size=1, max_size=6))
def test_product_is_sumset(S, F):
    got = set(window_product(FiniteWindow.of(S), FiniteWindow.of(F)).elements)
    assert got == {(s + f,) for s in S for f in F}
