import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwsaddle.surface import (PerturbationConfig, Side, Surface, SurfaceError, SurfacePoint,
                              annulus_perturbation, canonicalize, chart_radius, default_surface,
                              from_chart, glued_step, psi_invert, seam_routes, step_many,
                              surface_distance, to_chart)
from cwsaddle.torus_da import TorusPoint, da_step, anomalous_da_step

SURF = default_surface()
annulus_r = st.floats(0.5, 2.0)
angle = st.floats(0, 2 * math.pi)


def _annulus_points(n, seed):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.5, 2.0, n)
    th = rng.uniform(0, 2 * math.pi, n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def test_psi_examples():
    assert psi_invert((2, 0)) == (0.5, 0.0)
    for th in np.linspace(0, 2 * math.pi, 17):
        u = (math.cos(th), math.sin(th))
        assert psi_invert(u) == pytest.approx(u, abs=1e-15)
    with pytest.raises(ValueError):
        psi_invert((0, 0))


@given(annulus_r, angle)
def test_psi_involution_and_annulus(r, th):
    x = (r * math.cos(th), r * math.sin(th))
    y = psi_invert(x)
    assert 0.5 - 1e-12 <= math.hypot(*y) <= 2 + 1e-12
    assert math.dist(psi_invert(y), x) <= 1e-13


def test_seam_identity():
    for x in _annulus_points(1000, 0):
        lhs = np.asarray(psi_invert(4 * x))
        assert np.abs(lhs - 0.25 * np.asarray(psi_invert(x))).max() <= 1e-13


def test_canonicalize_examples():
    sp = canonicalize(from_chart(1, (0.6, 0.0)))
    assert sp.side == Side.T2
    assert chart_radius(sp) == pytest.approx(1 / 0.6, abs=1e-9)
    p = from_chart(1, (0.0, 1.5))
    assert canonicalize(p) == p
    seam1 = canonicalize(from_chart(1, (0.6, 0.8)))
    seam2 = canonicalize(from_chart(2, psi_invert((0.6, 0.8))))
    assert seam1.side == seam2.side == Side.T1
    assert surface_distance(seam1, seam2) <= 1e-12
    with pytest.raises(SurfaceError):
        canonicalize(from_chart(1, (0.3, 0.0)))


def test_t2_radius_two_goes_to_t1_radius_two():
    out = glued_step(from_chart(2, (2.0, 0.0)))
    assert out.side == Side.T1
    assert to_chart(out) == pytest.approx((2.0, 0.0), abs=1e-9)


def test_chart_routes_agree():
    worst = max(surface_distance(*seam_routes(x)) for x in _annulus_points(1000, 1))
    assert worst <= 1e-9


def test_chart_conjugacy():
    # f1^-1 and f2 both act as x/4 on the chart disk
    for x in _annulus_points(200, 2):
        z1 = from_chart(1, x).point
        w = anomalous_da_step(z1, "inverse", SURF.da, SURF.insertion)
        assert to_chart(SurfacePoint(Side.T1, TorusPoint(*w))) == pytest.approx(tuple(x / 4), abs=1e-9)
        z2 = from_chart(2, x).point
        w = da_step(z2, "inverse", SURF.da)
        assert to_chart(SurfacePoint(Side.T2, TorusPoint(*w))) == pytest.approx(tuple(x / 4), abs=1e-9)


def test_g_equals_f_off_annulus():
    rng = np.random.default_rng(3)
    n = 0
    for side in (1, 2):
        pts = rng.random((700, 2))
        keep = []
        for z in pts:
            sp = SurfacePoint(Side(side), TorusPoint(*z))
            try:
                if chart_radius(sp) > 2.0:
                    keep.append(z)
            except SurfaceError:
                pass
        keep = np.array(keep)
        n += len(keep)
        sides = np.full(len(keep), side)
        a = step_many(sides, keep, "f")
        b = step_many(sides, keep, "g")
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert n >= 1000


@pytest.mark.parametrize("name", ["f", "g"])
def test_round_trip_bulk(name):
    rng = np.random.default_rng(4)
    pts = rng.random((10_000, 2))
    sides = rng.integers(1, 3, 10_000)
    keep = np.array([chart_radius(SurfacePoint(Side(s), TorusPoint(*z))) >= 1.0
                     for s, z in zip(sides, pts)])
    sides, pts = sides[keep], pts[keep]
    s1, p1, st1 = step_many(sides, pts, name, "forward")
    s2, p2, st2 = step_many(s1, p1, name, "inverse")
    assert not st1.any() and not st2.any()
    assert np.array_equal(s2, sides)
    d = np.hypot(*((p2 - pts + 0.5) % 1 - 0.5).T)
    assert d.max() <= 1e-8


def test_round_trip_on_annulus():
    for x in _annulus_points(300, 5):
        sp = canonicalize(from_chart(1, x))
        for name in ("f", "g"):
            back = glued_step(glued_step(sp, name), name, "inverse")
            assert surface_distance(back, sp) <= 1e-8


def test_wandering_transit():
    for x in _annulus_points(100, 6):
        sp = canonicalize(from_chart(1, x))
        fwd = sp
        for _ in range(10):
            fwd = glued_step(fwd)
            if fwd.side == Side.T1 and chart_radius(fwd) > 2:
                break
        else:
            pytest.fail(f"forward orbit of {x} stays in the handle")
        back = sp
        for _ in range(10):
            back = glued_step(back, direction="inverse")
            if back.side == Side.T2 and chart_radius(back) > 2:
                break
        else:
            pytest.fail(f"backward orbit of {x} stays in the handle")


def test_perturbation_examples():
    zero = PerturbationConfig(amplitude=0.0)
    for x in _annulus_points(50, 7):
        assert annulus_perturbation(x, zero) == pytest.approx(tuple(x), abs=1e-15)
    for r in (0.5, 2.0):
        for x in ((r, 0.0), (0.0, r), (-r, 0.0), (0.0, -r), (0.6 * r, -0.8 * r)):
            assert annulus_perturbation(x) == pytest.approx(x, abs=1e-15)
    th = np.linspace(0, 2 * math.pi, 721)
    radii = [math.hypot(*annulus_perturbation((math.cos(t), math.sin(t)))) for t in th]
    assert max(radii) - min(radii) > 0.02
    with pytest.raises(ValueError):
        annulus_perturbation((0.1, 0.0))


@given(annulus_r, angle)
def test_perturbation_inverse(r, th):
    x = (r * math.cos(th), r * math.sin(th))
    y = annulus_perturbation(x)
    assert 0.5 - 1e-12 <= math.hypot(*y) <= 2.0 + 1e-12
    assert math.dist(annulus_perturbation(y, direction="inverse"), x) <= 1e-12


def test_perturbation_config_validation():
    with pytest.raises(ValueError):
        PerturbationConfig(amplitude=-0.1)
    with pytest.raises(ValueError):
        PerturbationConfig(amplitude=0.5)
    with pytest.raises(ValueError):
        PerturbationConfig(amplitude=0.2, mode=6)
    PerturbationConfig(amplitude=0.2, mode=6, twist=False)


def test_bad_arguments():
    sp = from_chart(1, (0.0, 1.5))
    with pytest.raises(ValueError):
        glued_step(sp, "h")
    with pytest.raises(ValueError):
        glued_step(sp, "f", "sideways")
    with pytest.raises(ValueError):
        seam_routes((3.0, 0.0))
    assert isinstance(Surface(), Surface)
