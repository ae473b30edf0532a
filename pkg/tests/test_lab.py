import math

import numpy as np
import pytest

from cwsaddle.lab import (ContinuumSample, System, cardinality_search, e_components, falsify_cwe,
                          gamma_sample, retrack, spine_probe, stable_partition_sample,
                          track_continuum)
from cwsaddle.surface import Side, SurfacePoint, default_surface, to_chart
from cwsaddle.torus_da import TorusPoint

F = System("surface", "f")
G = System("surface", "g")
PLANE = System("plane")


@pytest.mark.parametrize("system", [F, G, PLANE], ids=["f", "g", "plane"])
def test_singleton_has_zero_diameter(system):
    frame = "plane" if system.kind == "plane" else "chart"
    C = ContinuumSample.singleton((0.3, 1.2) if frame == "chart" else (0.5, 0.2), frame)
    rep = track_continuum(system, C, 10, 10)
    assert rep.max_diam == 0.0 and rep.status == "ok"


def test_max_diam_bounds_initial_diameter():
    C = ContinuumSample.segment((0.0, 1.0), (0.0, 1.6), 0.0125, "chart", 1, 4)
    rep = track_continuum(F, C, 5, 5)
    assert rep.max_diam >= rep.initial_diam > 0


def test_unit_circle_arc_example():
    """The literal example: an arc of the unit circle of chart length 0.05
    stays below 0.06 under f. The handle maps are 4x forward on side 1 and
    4x backward on side 2, so the arc is stretched in both time directions
    rather than contracted; this fails (see the notes)."""
    C = ContinuumSample.circle_arc(1.0, 0.3, 0.05, 0.0125)
    rep = track_continuum(F, C, 40, 40, stop_above=0.06)
    diam, at = rep.max_diam, rep.argmax_n
    assert diam <= 0.06, f"max_diam {diam:.4f} at n = {at}"



def test_axis_arc_stays_small():
    # the radial arc on the stable axis is what actually survives under f
    C = ContinuumSample.segment((0.0, 1.0), (0.0, 1.6), 0.0125, "chart", 1, 4)
    rep = track_continuum(F, C, 40, 40)
    assert rep.status == "ok" and rep.max_diam <= 0.05


def test_unstable_segment_stretches():
    da = default_surface().da
    eu = da.basis[:, 0]
    start = np.array([0.5, 0.5]) - 0.025 * eu
    C = ContinuumSample.segment(start, start + 0.05 * eu, 0.0125, "torus", 1, 4)
    rep = track_continuum(F, C, 0, 8)
    assert rep.status == "ok"
    # the torus metric saturates at sqrt(2)/2; the unwrapped length exceeds 1
    assert rep.max_diam >= 0.65
    sides, pts = C.states_at(np.asarray(rep.final_params[1]), F)
    sides, pts = F.iterate(sides, pts, 8)
    assert F.gaps(sides, pts).sum() > 1.0


def test_tracker_soundness():
    C = ContinuumSample.segment((0.0, 1.0), (0.3, 1.5), 0.0125, "chart", 1, 4)
    rep = track_continuum(G, C, 4, 4)
    assert abs(retrack(G, C, rep) - rep.max_diam) <= 1e-6


def test_vertex_budget_is_inconclusive():
    C = ContinuumSample.segment((0.4, 0.5), (0.45, 0.5), 1e-4, "torus", 1)
    rep = track_continuum(F, C, 0, 20, vertex_budget=200)
    assert rep.status == "inconclusive"
    with pytest.raises(ValueError):
        track_continuum(F, C, -1, 0)


def test_falsifier_determinism():
    a = falsify_cwe(F, 0.05, trials=40, seed=7, budgets=(10, 10))
    b = falsify_cwe(F, 0.05, trials=40, seed=7, budgets=(10, 10))
    assert [c.to_dict() for c in a] == [c.to_dict() for c in b]
    assert [c.trial for c in a] == sorted(c.trial for c in a)


def test_large_eta_first_trial_is_candidate():
    out = falsify_cwe(F, 10.0, trials=1, seed=0, budgets=(5, 5))
    assert len(out) == 1 and out[0].trial == 0
    with pytest.raises(ValueError):
        falsify_cwe(F, 0.0, trials=1)


def test_falsifier_finds_axis_candidates_for_f():
    out = falsify_cwe(F, 0.05, trials=120, seed=0, budgets=(40, 40))
    assert out
    assert all(c.location == "annulus" for c in out)


def test_gamma_center_always_survives_and_eta_below_pitch():
    rep = gamma_sample(F, (0.3, 0.7), 0.02, 5, 20)
    assert any((s == 0).all() for s in rep.survivors)
    # eta below any nonzero offset: only the centre
    tiny = gamma_sample(F, (0.3, 0.7), 1e-9, 5, 1)
    assert tiny.count == 1


def test_gamma_monotonicity():
    c = (0.0, 1.0)
    big = gamma_sample(F, c, 0.05, 10, 40, 1, "chart")
    longer = gamma_sample(F, c, 0.05, 20, 40, 1, "chart")
    as_set = lambda r: {tuple(s) for s in r.survivors}
    assert as_set(longer) <= as_set(big)
    # a smaller eta on the same grid: offsets scale, so compare in torus units
    small = gamma_sample(F, c, 0.025, 10, 20, 1, "chart")
    assert small.pitch == big.pitch
    assert as_set(small) <= as_set(big)


def test_gamma_axis_cluster_for_f():
    rep = gamma_sample(F, (0.0, 1.0), 0.05, 40, 100, 1, "chart")
    on_axis = rep.survivors[rep.survivors[:, 0] == 0]
    assert on_axis.shape[0] >= 10
    assert rep.component_estimate == 1


def test_gamma_plane_origin():
    rep = gamma_sample(PLANE, (0.0, 0.0), 0.1, 30, 40)
    assert rep.component_estimate == 1
    assert any((s == 0).all() for s in rep.survivors)


def test_cardinality_search_hits_targets():
    hits = cardinality_search(F, targets=(2, 5, 10, 20))
    assert all(h is not None and h.survivors >= h.target for h in hits.values())


def test_stable_partition_examples():
    surf = default_surface()
    ins, da = surf.insertion, surf.da
    e_pts = [to_chart(SurfacePoint(Side.T1, TorusPoint(*ins.to_torus(X, Y, da))))
             for X, Y in [(0, 0), (0.75, 0.375), (0.5, 0.25), (0.3, 0.0), (0.625, 0.1)]]
    pts = e_pts + [(0.0, 1.2), (0.0, 1.5), (1.5, 0.0), (-1.5, 0.0)]
    labels = stable_partition_sample(F, horizon=12, points=pts).labels
    assert len(set(labels[:7])) == 1
    assert len({labels[0], labels[7], labels[8]}) == 3


def test_e_components_and_spine():
    assert e_components((0.5, 0.25), 0.2, 1e-3) >= 5
    assert spine_probe((0.75, 0.75), 0.01, 2.5e-4)["complement_components"] == 1
    assert spine_probe((0.75, 0.375), 0.01, 2.5e-4)["complement_components"] >= 2


def test_system_validation():
    with pytest.raises(ValueError):
        System("sphere")
    with pytest.raises(ValueError):
        System("surface", "h")
    with pytest.raises(ValueError):
        ContinuumSample([(0, 0)], 0.0)
