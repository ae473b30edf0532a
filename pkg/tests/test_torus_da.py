import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwsaddle.torus_da import (DAConfig, DAError, SaddleInsertion, TorusPoint, anomalous_da_step,
                               chart_transport, da_step, default_config, differential, grid_centres,
                               map_many, sampled_injectivity, torus_distance)

unit = st.floats(0, 1, exclude_max=True)
CFG = default_config()
INS = SaddleInsertion()


def test_torus_point_wraps():
    p = TorusPoint(1.25, -0.5)
    assert (p.x, p.y) == (0.25, 0.5)
    assert torus_distance((0.99, 0.0), (0.01, 0.0)) == pytest.approx(0.02)


def test_fixed_point():
    assert tuple(da_step((0, 0))) == (0.0, 0.0)
    assert tuple(da_step((0, 0), "inverse")) == (0.0, 0.0)


def test_repeller_is_4x_on_chart_disk():
    rng = np.random.default_rng(0)
    for _ in range(500):
        r, th = 2 * math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
        c = (r * math.cos(th), r * math.sin(th))
        img = da_step(chart_transport(c))
        assert torus_distance(img, chart_transport((4 * c[0], 4 * c[1]))) <= 1e-15


def test_anosov_eigenvalues_away_from_chart():
    J = differential(lambda z: da_step(z, cfg=CFG), (0.5, 0.5))
    ev = sorted(np.linalg.eigvals(J).real)
    assert ev == pytest.approx([(3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2], abs=1e-6)


def test_repeller_and_saddles_hyperbolicity():
    J = differential(lambda z: da_step(z), (0.0, 0.0), h=1e-6)
    assert np.all(np.linalg.svd(J, compute_uv=False) > 1)
    for q in CFG.saddle_points:
        assert tuple(da_step(q)) == pytest.approx(tuple(q), abs=1e-15)
        s = np.linalg.svd(differential(lambda z: da_step(z), tuple(q), h=1e-7), compute_uv=False)
        assert s[0] > 1 > s[1]


@given(unit, unit)
def test_inverse_consistency(x, y):
    back = da_step(da_step((x, y)), "inverse")
    assert torus_distance(back, (x, y)) <= 1e-9
    back = anomalous_da_step(anomalous_da_step((x, y), cfg=CFG, ins=INS), "inverse", CFG, INS)
    assert torus_distance(back, (x, y)) <= 1e-9


def test_inverse_consistency_bulk():
    pts = np.random.default_rng(1).random((10_000, 2))
    for ins in (None, INS):
        back = map_many(map_many(pts, "forward", CFG, ins), "inverse", CFG, ins)
        d = np.hypot(*((back - pts + 0.5) % 1.0 - 0.5).T)
        assert d.max() <= 1e-9


def test_insertion_examples():
    q = INS.to_torus(0.0, 0.0, CFG)
    assert torus_distance(q, CFG.saddle_points[0]) <= 1e-15
    assert torus_distance(anomalous_da_step(q, cfg=CFG, ins=INS), q) <= 1e-15
    img = anomalous_da_step(INS.to_torus(1.0, 0.5, CFG), cfg=CFG, ins=INS)
    assert torus_distance(img, INS.to_torus(0.5, 0.25, CFG)) <= 1e-12
    assert INS.to_plane(INS.to_torus(0.3, 0.7, CFG), CFG) == pytest.approx((0.3, 0.7), abs=1e-12)


def test_outside_rq_matches_da():
    rng = np.random.default_rng(2)
    q = np.array(tuple(CFG.saddle_points[0]))
    pts = rng.random((2000, 2))
    far = np.hypot(*((pts - q + 0.5) % 1 - 0.5).T) > 0.2
    a = map_many(pts[far], "forward", CFG)
    b = map_many(pts[far], "forward", CFG, INS)
    assert np.array_equal(a, b)


def test_injectivity_600():
    for ins in (None, INS):
        rep = sampled_injectivity(map_many(grid_centres(600), "forward", CFG, ins), 600)
        assert rep.ok, rep


def test_chart_transport():
    assert tuple(chart_transport((0, 0))) == (0.0, 0.0)
    rng = np.random.default_rng(3)
    for c in rng.uniform(-3, 3, (200, 2)):
        back = chart_transport(chart_transport(c), "to_plane")
        assert back == pytest.approx(tuple(c), abs=1e-14)
    # the stable eigendirection pulls back to the vertical axis
    es = CFG.basis[:, 1]
    z = chart_transport(np.mod(0.01 * es, 1.0), "to_plane")
    assert z[0] == pytest.approx(0.0, abs=1e-13) and z[1] > 0
    with pytest.raises(ValueError):
        chart_transport((9.0, 0.0))
    with pytest.raises(ValueError):
        chart_transport((0.5, 0.5), "to_plane")


def test_config_validation():
    with pytest.raises(ValueError):
        DAConfig(anosov_matrix=((1, 1), (0, 1)))
    with pytest.raises(ValueError):
        DAConfig(chart_scale=0.04)
    with pytest.raises(ValueError):
        DAConfig(blend_profile="linear")
    DAConfig(blend_profile="cosine")


def test_bad_direction():
    with pytest.raises(ValueError):
        da_step((0.1, 0.1), "sideways")
    assert issubclass(DAError, RuntimeError)
