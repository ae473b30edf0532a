import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwsaddle.plmap import (M1, M2, M3, PLMap, PLMapError, Region, apply_pl, check_m3,
                            classify_region, derive_m3)

dyadic = st.integers(-4096, 4096).map(lambda k: k / 1024.0)


@pytest.mark.parametrize("p,r", [((2, 1), Region.LOWER_WEDGE), ((-1, 3), Region.OUTER),
                                 ((1, 2), Region.UPPER_WEDGE), ((1, 1), Region.LOWER_WEDGE),
                                 ((1, 0), Region.LOWER_WEDGE), ((0, 1), Region.OUTER)])
def test_classify(p, r):
    assert classify_region(p) == r


@pytest.mark.parametrize("p,d,img", [((1, 1), "forward", (0.5, 0.5)), ((0, 1), "forward", (0, 2)),
                                     ((4, -2), "forward", (2, -4)), ((0.5, 0.5), "inverse", (1, 1))])
def test_apply_examples(p, d, img):
    assert apply_pl(p, d) == img


def test_matrices():
    assert np.linalg.det(M1) == 0.25
    assert np.linalg.det(M2) == pytest.approx(1) and np.linalg.det(M3) == pytest.approx(1)
    assert np.array_equal(derive_m3(), M3)
    for m in (M1, M2, M3):
        assert tuple(m[0]) == (0.5, 0.0)


def test_tampered_m3_rejected():
    with pytest.raises(PLMapError):
        check_m3(np.array([[0.5, 0.0], [-1.0, 2.0]]))
    with pytest.raises(PLMapError):
        PLMap(m3=np.array([[0.5, 0.0], [-1.5, 2.5]]))


@given(dyadic, dyadic)
def test_round_trip_exact(x, y):
    assert apply_pl(apply_pl((x, y)), "inverse") == (x, y)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_x_halving(x, y):
    assert apply_pl((x, y))[0] == x / 2


def test_boundary_agreement():
    rng = np.random.default_rng(1)
    for t in rng.uniform(0, 10, 10_000):
        d = (t, t)
        assert np.array_equal(M1 @ d, M3 @ d)
        ax = np.array([t, 0.0])
        assert np.array_equal(M1 @ ax, M2 @ ax)
        ay = np.array([0.0, t])
        assert np.array_equal(M2 @ ay, M3 @ ay)


def test_continuity_across_boundaries():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        t = rng.uniform(0.01, 5)
        base = [(t, t), (t, 0.0), (0.0, t)][rng.integers(3)]
        delta = rng.uniform(-1e-9, 1e-9, 2)
        p = np.add(base, delta)
        a, b = np.array(apply_pl(p)), np.array(apply_pl(base))
        assert np.linalg.norm(a - b) <= 4 * np.linalg.norm(delta) + 1e-18


@given(st.floats(0.01, 10), st.floats(0.01, 10))
def test_region_invariance(a, b):
    for p in ((max(a, b), min(a, b) * 0.5), (-a, b), (a, -b), (min(a, b) * 0.5, max(a, b))):
        if p[0] == p[1]:
            continue
        assert classify_region(apply_pl(p)) == classify_region(p)


def test_plmap_object():
    T = PLMap()
    assert T((1, 1)) == (0.5, 0.5)
    assert T.classify((1, 2)) == Region.UPPER_WEDGE
    assert np.allclose(T.inverses[0], np.diag([2.0, 2.0]))
