import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwsaddle.eset import (ESet, brute_force_rho, e_membership, e_membership_many, rho, rho_many,
                           segment_abscissa)

coord = st.floats(-2.0, 2.0, allow_nan=False)


@pytest.mark.parametrize("n,i,a", [(1, 1, 1.0), (2, 1, 0.5), (3, 2, 0.1875)])
def test_abscissa_examples(n, i, a):
    assert segment_abscissa(n, i) == a


def test_abscissa_monotone_and_bracketed():
    for n in range(1, 30):
        prev = math.inf
        for i in range(1, 40):
            a = segment_abscissa(n, i)
            assert 2.0 ** -n < a <= 2.0 ** (1 - n)
            assert a < prev
            assert a > segment_abscissa(n + 1, i)
            prev = a


@pytest.mark.parametrize("n,i", [(0, 1), (1, 0), (-3, 2), (1, 60)])
def test_abscissa_rejects(n, i):
    with pytest.raises(ValueError):
        segment_abscissa(n, i)


def test_closedness_accumulation_is_a_segment():
    # generation n accumulates at 2^-n = abscissa(n+1, 1)
    for n in range(1, 20):
        assert segment_abscissa(n + 1, 1) == 2.0 ** -n
        assert e_membership((2.0 ** -n, 0.5 * 2.0 ** -n))


@pytest.mark.parametrize("p,inside", [((1, 0.5), True), ((0.3, 0), True), ((0.9, 0.5), False),
                                      ((0.75, 0.75), True), ((0.75, 0.76), False), ((0.0, 0.0), True)])
def test_membership_examples(p, inside):
    assert e_membership(p) is inside


@pytest.mark.parametrize("p,d,w", [((1, 0.5), 0.0, (1, 0.5)),
                                   ((0.875, 0.875), 0.125, (1, 0.875)),
                                   ((0.5, -0.25), 0.25, (0.5, 0))])
def test_rho_examples(p, d, w):
    got, wit = rho(p)
    assert got == pytest.approx(d, abs=1e-15)
    assert wit == pytest.approx(w, abs=1e-15)


def test_rho_matches_bruteforce_oracle():
    rng = np.random.default_rng(3)
    for p in rng.uniform(-0.5, 1.5, (300, 2)):
        if abs(p[0]) < 2.0 ** -18:
            continue
        assert rho(p)[0] == pytest.approx(brute_force_rho(p)[0], abs=1e-12)


@given(coord, coord, coord, coord)
def test_lipschitz(a, b, c, d):
    assert abs(rho((a, b))[0] - rho((c, d))[0]) <= math.hypot(a - c, b - d) + 1e-12


@given(coord, coord)
def test_witness_soundness(x, y):
    d, w = rho((x, y))
    assert e_membership(w)
    assert math.hypot(x - w[0], y - w[1]) == pytest.approx(d, abs=1e-12)


@given(st.integers(-64, 96), st.integers(-64, 96))
def test_zero_set_on_dyadics(i, j):
    p = (i / 64.0, j / 64.0)
    assert (rho(p)[0] == 0.0) == e_membership(p)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_self_similarity(x, y):
    assert rho((x / 2, y / 2))[0] <= rho((x, y))[0] / 2 + 1e-15


def test_vectorised_agrees():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 2, (500, 2))
    d, w = rho_many(pts)
    for k in range(0, 500, 37):
        dk, wk = rho(pts[k])
        assert d[k] == dk and tuple(w[k]) == wk
    pts[:5] = [(1, 0.5), (0.3, 0), (0.5, 0.5), (0.9, 0.5), (2, 0)]
    assert e_membership_many(pts[:5]).tolist() == [True, True, True, False, False]


def test_eset_enumeration():
    segs = list(ESet().segments(8, 12))
    assert len(segs) == 96
    assert all(e_membership((a, a)) for _, _, a in segs)
    assert ESet().distance((0.5, -0.25)) == 0.25
