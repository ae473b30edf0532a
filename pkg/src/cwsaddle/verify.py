"""Per-module invariant suites behind ``cwsaddle verify``.

Each suite returns a list of :class:`Check` records (name, pass/fail,
measured residual, tolerance). Sample sizes come from
``RunConfig.verify_samples`` and all randomness from ``RunConfig.seed``, so
a report is a pure function of the configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"module": self.module, "name": self.name, "passed": bool(self.passed),
                "residual": _num(self.residual), "tolerance": _num(self.tolerance),
                "detail": self.detail}


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


def _check(module, name, residual, tol, detail="", le=True):
    ok = residual <= tol if le else residual >= tol
    return Check(module, name, bool(ok), float(residual), float(tol), detail)


# ------------------------------------------------------------------ suites

def suite_eset(cfg: RunConfig, rng) -> list[Check]:
    from .eset import brute_force_rho, e_membership, rho, rho_many, segment_abscissa

    n = cfg.verify_samples
    p = rng.uniform(-2, 2, (n, 2))
    q = rng.uniform(-2, 2, (n, 2))
    dp, _ = rho_many(p)
    dq, _ = rho_many(q)
    lip = float(np.max(np.abs(dp - dq) - np.hypot(*(p - q).T)))
    out = [_check("eset_geometry", "lipschitz", lip, 1e-12, f"{n} pairs in [-2,2]^2")]
    m = min(n, 200)
    pts = rng.uniform(0.05, 1.2, (m, 2))
    err = max(abs(rho(t)[0] - brute_force_rho(t)[0]) for t in pts)
    out.append(_check("eset_geometry", "brute_force_oracle", err, 1e-12,
                      f"{m} points away from the origin"))
    tops = [(segment_abscissa(k, i), segment_abscissa(k, i)) for k in range(1, 6) for i in range(1, 13)]
    miss = sum(not e_membership(t) for t in tops) + sum(rho(t)[0] != 0.0 for t in tops)
    out.append(_check("eset_geometry", "segment_tops_in_e", miss, 0, "generations 1-5, indices 1-12"))
    return out


def suite_plmap(cfg: RunConfig, rng) -> list[Check]:
    from .plmap import PLMapError, apply_pl, check_m3

    out = []
    try:
        check_m3(cfg.m3_matrix())
        out.append(Check("plmap", "m3_derivation", True, 0.0, 0.0))
    except PLMapError as exc:
        out.append(Check("plmap", "m3_derivation", False, math.inf, 0.0, str(exc)))
    n = cfg.verify_samples
    pts = rng.uniform(-2, 2, (n, 2))
    rt = max(math.hypot(*(np.subtract(apply_pl(apply_pl(t), "inverse"), t))) for t in pts)
    out.append(_check("plmap", "inverse_round_trip", rt, 1e-15))
    halving = max(abs(apply_pl(t)[0] - 0.5 * t[0]) for t in pts)
    out.append(_check("plmap", "x_halving_exact", halving, 0.0))
    return out


def suite_flow(cfg: RunConfig, rng) -> list[Check]:
    from .flow import closed_form_oracle, flow

    ic = cfg.integrator()
    n = min(cfg.verify_samples, 300)
    worst = 0.0
    for k in range(n):
        t = float(rng.uniform(0, 3))
        if k % 2:
            p = (1.0, float(rng.uniform(1, 2)))
        else:
            p = (float(rng.uniform(0, 1)), float(rng.uniform(-2, -1e-3)))
        got = flow(p, t, ic).endpoint
        exp = closed_form_oracle(p, t)
        worst = max(worst, math.hypot(got[0] - exp[0], got[1] - exp[1]))
    out = [_check("vertical_flow", "closed_form_oracle", worst, 1e-8, f"{n} cases")]
    semi = 0.0
    for _ in range(n):
        p = rng.uniform(0, 1, 2)
        s, t = rng.uniform(0, 1, 2)
        a = flow(flow(p, s, ic).endpoint, t, ic).endpoint
        b = flow(p, s + t, ic).endpoint
        semi = max(semi, abs(a[1] - b[1]))
    out.append(_check("vertical_flow", "semigroup", semi, 1e-7, f"{n} cases"))
    return out


def suite_saddle(cfg: RunConfig, rng) -> list[Check]:
    from .eset import segment_abscissa
    from .saddle import lemma_residuals, saddle_step, stable_verdict

    ic = cfg.integrator()
    n = min(cfg.verify_samples, 300)
    half = 0.0
    for _ in range(n):
        x = rng.uniform(0, 1)
        half = max(half, lemma_residuals((x, rng.uniform(0, x)), 0.0, ic).half_residual)
    out = [_check("anomalous_saddle", "rho_halving", half, 1e-9, f"{n} points of R1")]
    pts = rng.uniform(-1, 1, (n, 2))
    xh = max(abs(saddle_step(t, cfg=ic)[0] - 0.5 * t[0]) for t in pts)
    out.append(_check("anomalous_saddle", "x_halving_exact", xh, 0.0))
    e = [(segment_abscissa(k, i), 0.5 * segment_abscissa(k, i)) for k in (1, 2, 3) for i in (1, 3, 7)]
    err = max(math.hypot(*np.subtract(saddle_step(p, cfg=ic), (0.5 * p[0], 0.5 * p[1]))) for p in e)
    out.append(_check("anomalous_saddle", "e_halving", err, 1e-9))
    v = stable_verdict((0.9, 0.2), 200, cfg=ic)
    out.append(Check("anomalous_saddle", "off_e_escapes", v.tag == "escapes", float(v.n), 200.0, str(v)))
    return out


def suite_torus(cfg: RunConfig, rng) -> list[Check]:
    from .torus_da import (_da_forward, _da_inverse, grid_centres, map_many, sampled_injectivity,
                           torus_distance)

    da, ins = cfg.da(), cfg.insertion()
    P = da.params()
    n = cfg.verify_samples
    pts = rng.random((n, 2))
    rt = 0.0
    for t in pts:
        a, b, _ = _da_inverse(t[0], t[1], P)
        rt = max(rt, torus_distance(_da_forward(a, b, P), t))
    out = [_check("torus_da", "da_inverse_round_trip", rt, 1e-12, f"{n} points")]
    fwd = map_many(pts, "forward", da, ins)
    back = map_many(fwd, "inverse", da, ins)
    rt2 = max(torus_distance(a, b) for a, b in zip(back, pts))
    out.append(_check("torus_da", "anomalous_round_trip", rt2, 1e-9, f"{n} points"))
    L = da.linear_radius
    c = rng.uniform(-1, 1, (n, 2))
    c = c[np.hypot(*c.T) <= 1] * L * 0.999
    lin = 0.0
    for u in c:
        z = np.mod(da.basis @ u, 1.0)
        w = np.mod(da.basis @ (4 * u), 1.0)
        lin = max(lin, torus_distance(_da_forward(z[0], z[1], P), w))
    out.append(_check("torus_da", "repeller_is_4x", lin, 1e-15, "chart disk"))
    inj = sampled_injectivity(map_many(grid_centres(64), "forward", da, ins), 64)
    out.append(Check("torus_da", "sampled_injectivity", inj.ok, inj.min_image_distance,
                     inj.threshold, "64x64 grid; residual is the closest image pair"))
    return out


def suite_surface(cfg: RunConfig, rng) -> list[Check]:
    from .surface import (Side, SurfaceError, SurfacePoint, canonicalize, glued_step, psi_invert,
                          seam_routes, surface_distance)
    from .torus_da import TorusPoint

    surf = cfg.surface()
    n = cfg.verify_samples
    r = rng.uniform(0.5, 2.0, n)
    th = rng.uniform(0, 2 * math.pi, n)
    pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
    inv = max(math.hypot(*np.subtract(psi_invert(psi_invert(p)), p)) for p in pts)
    out = [_check("genus2_surface", "psi_involution", inv, 1e-13)]
    seam = max(math.hypot(*np.subtract(psi_invert(4 * p), 0.25 * np.asarray(psi_invert(p)))) for p in pts)
    out.append(_check("genus2_surface", "seam_identity", seam, 1e-13))
    m = min(n, 300)
    routes = 0.0
    for p in pts[:m]:
        a, b = seam_routes(p, surf)
        routes = max(routes, surface_distance(a, b, surf))
    out.append(_check("genus2_surface", "chart_routes_agree", routes, 1e-9, f"{m} annulus points"))
    rt = 0.0
    for z in rng.random((m, 2)):
        try:
            sp = canonicalize(SurfacePoint(Side.T2, TorusPoint(*z)), surf)
        except SurfaceError:  # inside the removed disk
            continue
        for name in ("f", "g"):
            back = glued_step(glued_step(sp, name, "forward", surf), name, "inverse", surf)
            rt = max(rt, surface_distance(back, sp, surf))
    out.append(_check("genus2_surface", "round_trip", rt, 1e-8, f"{m} points, f and g"))
    return out


def suite_lab(cfg: RunConfig, rng) -> list[Check]:
    from .lab import ContinuumSample, System, e_components, track_continuum

    k = e_components((0.5, 0.25), 0.2, 1e-3)
    out = [_check("expansivity_lab", "e_components", k, 5, "B((1/2,1/4), 0.2) at pitch 1e-3", le=False)]
    surf = cfg.surface()
    f = System("surface", "f", surf, cfg.integrator())
    C = ContinuumSample.segment((0.0, 1.0), (0.0, 1.6), 0.25 * cfg.eta, "chart", 1, 4)
    rep = track_continuum(f, C, 10, 10, cfg.vertex_budget, stop_above=cfg.eta)
    out.append(Check("expansivity_lab", "axis_arc_stays_small", rep.status == "ok" and rep.max_diam <= cfg.eta,
                     rep.max_diam, cfg.eta, f"f, budget (10, 10), status {rep.status}"))
    return out


SUITES = {
    "eset_geometry": suite_eset,
    "plmap": suite_plmap,
    "vertical_flow": suite_flow,
    "anomalous_saddle": suite_saddle,
    "torus_da": suite_torus,
    "genus2_surface": suite_surface,
    "expansivity_lab": suite_lab,
}


def run_suites(modules, cfg: RunConfig) -> list[Check]:
    """Run the named suites in order; raises KeyError on an unknown name."""
    unknown = [m for m in modules if m not in SUITES]
    if unknown:
        raise KeyError(", ".join(unknown))
    out = []
    order = list(SUITES)
    for m in modules:
        rng = np.random.default_rng([cfg.seed, order.index(m)])
        out.extend(SUITES[m](cfg, rng))
    return out
