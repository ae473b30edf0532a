import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwsaddle.eset import e_membership, segment_abscissa
from cwsaddle.saddle import (R1, Rectangle, SaddleMap, Verdict, lemma_residuals, orbit, saddle_step,
                             stable_verdict, verdict_grid)


def test_step_examples():
    assert saddle_step((1, 0.5)) == (0.5, 0.25)
    x, y = saddle_step((0.5, -1))
    assert x == 0.25 and y == pytest.approx(-2 * math.exp(-1), abs=1e-9)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_x_halving_exact(x, y):
    assert saddle_step((x, y))[0] == x / 2


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_invertible(x, y):
    back = saddle_step(saddle_step((x, y)), "inverse")
    assert math.dist(back, (x, y)) <= 1e-7


@pytest.mark.parametrize("n,i,s", [(1, 1, 0.5), (1, 3, 1.0), (2, 2, 0.0), (3, 5, 0.7)])
def test_e_contraction(n, i, s):
    a = segment_abscissa(n, i)
    p = (a, s * a)
    orb = orbit(p, 30)
    for k in range(31):
        assert orb[k] == pytest.approx((p[0] / 2 ** k, p[1] / 2 ** k), abs=1e-9)


def test_verdict_examples():
    v = stable_verdict((0.75, 0))
    assert v.tag == "converges" and str(v) == "Converges"
    v = stable_verdict((0.9, 0.2), 200)
    assert v.tag == "escapes" and 1 <= v.n <= 200
    assert str(stable_verdict((-0.5, 0.5))) == "Escapes(1)"


def test_verdict_region_and_budget():
    box = Rectangle(0.0, 1.0, 0.0, 1.0)
    assert stable_verdict((0.9, 0.2), 200, box).tag == "escapes"
    v = stable_verdict((0.4, 0.2001), 3)
    assert v.tag == "undecided" and v.n == 3 and math.isfinite(v.final_norm)
    with pytest.raises(ValueError):
        stable_verdict((0.5, 0.1), 0)
    with pytest.raises(ValueError):
        Rectangle(1, 0, 0, 1)
    assert Verdict.escapes(4).n == 4 and Verdict.undecided(7).tag == "undecided"


def test_lemma_examples():
    r = lemma_residuals((1, 0.5), 0.7)
    assert r.half_residual == 0 and r.commute_residual == 0
    r = lemma_residuals((0.9, 0.2), 0.0)
    assert r.half_residual <= 1e-9 and r.commute_residual == 0
    r = lemma_residuals((0.9, 0.2), 0.5)
    assert r.commute_residual is not None and r.commute_residual <= 1e-7


def test_lemma_preconditions():
    with pytest.raises(ValueError):
        lemma_residuals((0.2, 0.5), 0.1)
    with pytest.raises(ValueError):
        lemma_residuals((0.5, 0.2), -1.0)
    r = lemma_residuals((0.9, 0.85), 5.0)
    assert r.commute_residual is None and "leaves" in r.note


@given(st.floats(0, 1), st.floats(0, 1))
def test_rho_halving_on_r1(a, b):
    x, y = max(a, b), min(a, b)
    assert lemma_residuals((x, y), 0.0).half_residual <= 1e-9


def test_small_grid_dichotomy():
    g = verdict_grid(40, 200)
    on_e = np.array([e_membership(p) for p in g.points])
    assert np.all(g.tags[on_e] == 0)
    assert np.all(g.tags[~on_e] != 0)
    # undecided only near E
    assert np.all(g.rho[g.tags == 2] < 0.05)
    assert sum(g.counts().values()) == 41 * 41


def test_saddle_map_handle():
    f = SaddleMap()
    assert f((1, 0.5)) == (0.5, 0.25)
    assert f.verdict((0.75, 0.0)).tag == "converges"
    assert R1.contains((0.5, 0.25)) and not R1.contains((0.25, 0.5))


def test_step_many_matches_scalar():
    from cwsaddle.saddle import saddle_step_many

    pts = np.random.default_rng(5).uniform(-1.5, 1.5, (200, 2))
    fwd = saddle_step_many(pts)
    assert np.array_equal(fwd, np.array([saddle_step(p) for p in pts]))
    assert np.abs(saddle_step_many(fwd, "inverse") - pts).max() <= 1e-7
    with pytest.raises(ValueError):
        saddle_step_many(pts, "up")
