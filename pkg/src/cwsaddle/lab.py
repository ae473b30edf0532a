"""Expansivity experiments: continuum tracking, Gamma sampling, falsification.

Everything here works on a :class:`System`, either the glued surface map
(f or g) or the plane saddle. States are carried as parallel arrays
``(sides, points)``; for the plane the side is always 0. Surface points are
kernel states (rotated torus coordinates, see :func:`surface.to_states`),
which keep points of the stable axis exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .eset import _rho
from .flow import IntegratorConfig
from .saddle import _step as _saddle_step
from .surface import (FORWARD, INVERSE, Side, Surface, SurfaceError, _canon, _distance,
                      _from_chart, _radius, _status, default_surface, step_states, to_states)
from .torus_da import _to_u

OK = "ok"
INCONCLUSIVE = "inconclusive"
STOPPED = "stopped"  # tracking halted once max_diam exceeded stop_above


# ----------------------------------------------------------------- kernels

@njit
def _plane_step_many(xs, ys, fwd, I, out_x, out_y, out_st):
    for k in range(xs.shape[0]):
        a, b, st = _saddle_step(xs[k], ys[k], fwd, I[0], I[1], I[2], int(I[3]))
        out_x[k] = a
        out_y[k] = b
        out_st[k] = st


@njit
def _surface_dist_to(s0, x0, y0, sides, xs, ys, P, C, out):
    for k in range(xs.shape[0]):
        out[k] = _distance(s0, x0, y0, sides[k], xs[k], ys[k], P, C)


@njit
def _surface_diam(sides, xs, ys, P, C):
    best = 0.0
    n = xs.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            d = _distance(sides[i], xs[i], ys[i], sides[j], xs[j], ys[j], P, C)
            if d > best:
                best = d
    return best


@njit
def _surface_gaps(sides, xs, ys, P, C, out):
    for k in range(xs.shape[0] - 1):
        out[k] = _distance(sides[k], xs[k], ys[k], sides[k + 1], xs[k + 1], ys[k + 1], P, C)


@njit
def _canon_many(sides, xs, ys, P, C, out_s, out_x, out_y, out_st):
    for k in range(xs.shape[0]):
        s, a, b, st = _canon(sides[k], xs[k], ys[k], P, C)
        out_s[k] = s
        out_x[k] = a
        out_y[k] = b
        out_st[k] = st


# ------------------------------------------------------------------ systems

@dataclass(frozen=True)
class System:
    """A map together with its state space metric.

    ``kind`` is ``"surface"`` (``map_name`` ``"f"`` or ``"g"``) or
    ``"plane"`` (the plane saddle; distances are Euclidean).
    """

    kind: str = "surface"
    map_name: str = "f"
    surface: Surface = field(default_factory=default_surface)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if self.kind not in ("surface", "plane"):
            raise ValueError("kind must be 'surface' or 'plane'")
        if self.kind == "surface" and self.map_name not in ("f", "g"):
            raise ValueError("surface map must be 'f' or 'g'")

    @property
    def label(self) -> str:
        return "plane-saddle" if self.kind == "plane" else self.map_name

    def step(self, sides, pts, forward: bool = True):
        if self.kind == "plane":
            xs = np.ascontiguousarray(pts[:, 0])
            ys = np.ascontiguousarray(pts[:, 1])
            ox, oy = np.empty_like(xs), np.empty_like(ys)
            st = np.empty(xs.shape[0], dtype=np.int64)
            I = np.array([*self.integrator.as_tuple()[:3], float(self.integrator.max_steps)])
            _plane_step_many(xs, ys, forward, I, ox, oy, st)
            if np.any(st):
                raise RuntimeError("integrator budget exhausted while stepping the plane saddle")
            return sides, np.column_stack([ox, oy])
        s, p, st = step_states(sides, pts, self.map_name, FORWARD if forward else INVERSE, self.surface)
        bad = np.flatnonzero(st)
        if bad.size:
            _status(int(st[bad[0]]), f"{self.map_name} step at {pts[bad[0]]}")
        return s, p

    def iterate(self, sides, pts, n: int, forward: bool = True):
        for _ in range(n):
            sides, pts = self.step(sides, pts, forward)
        return sides, pts

    def dist_to(self, s0, p0, sides, pts) -> np.ndarray:
        if self.kind == "plane":
            return np.hypot(pts[:, 0] - p0[0], pts[:, 1] - p0[1])
        P, _, _, _, C = self.surface.arrays()
        out = np.empty(pts.shape[0])
        _surface_dist_to(int(s0), float(p0[0]), float(p0[1]), np.ascontiguousarray(sides),
                         np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), P, C, out)
        return out

    def gaps(self, sides, pts) -> np.ndarray:
        if self.kind == "plane":
            return np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
        P, _, _, _, C = self.surface.arrays()
        out = np.empty(max(pts.shape[0] - 1, 0))
        _surface_gaps(np.ascontiguousarray(sides), np.ascontiguousarray(pts[:, 0]),
                      np.ascontiguousarray(pts[:, 1]), P, C, out)
        return out

    def diameter(self, sides, pts) -> float:
        if pts.shape[0] < 2:
            return 0.0
        if self.kind == "plane":
            # points of a polyline: exact via pairwise distances in blocks
            best = 0.0
            for i in range(0, pts.shape[0], 2048):
                blk = pts[i:i + 2048]
                d = np.hypot(blk[:, None, 0] - pts[None, :, 0], blk[:, None, 1] - pts[None, :, 1])
                best = max(best, float(d.max()))
            return best
        P, _, _, _, C = self.surface.arrays()
        return float(_surface_diam(np.ascontiguousarray(sides), np.ascontiguousarray(pts[:, 0]),
                                   np.ascontiguousarray(pts[:, 1]), P, C))


# -------------------------------------------------------------- continua

@dataclass(frozen=True)
class ContinuumSample:
    """A polyline continuum, parametrised by ``s`` in ``[0, len(vertices) - 1]``.

    ``frame`` says how ``vertices`` are read: ``"chart"`` (chart coordinates
    on ``side``), ``"torus"`` (unwrapped torus coordinates on ``side``) or
    ``"plane"``. Points between vertices are linear interpolations in that
    frame; refinement bisects this parameter.
    """

    vertices: np.ndarray
    refine_threshold: float
    frame: str = "chart"
    side: int = 1

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)
        if self.frame not in ("chart", "torus", "plane"):
            raise ValueError("frame must be chart, torus or plane")
        if not self.refine_threshold > 0:
            raise ValueError("refine_threshold must be positive")

    def coords_at(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        v = self.vertices
        if v.shape[0] == 1:
            return np.repeat(v, params.shape[0], axis=0)
        i = np.clip(np.floor(params).astype(np.int64), 0, v.shape[0] - 2)
        t = (params - i)[:, None]
        return v[i] * (1 - t) + v[i + 1] * t

    def states_at(self, params, system: System):
        c = self.coords_at(params)
        n = c.shape[0]
        if self.frame == "plane":
            return np.zeros(n, dtype=np.int64), c
        P, _, _, _, C = system.surface.arrays()
        sides = np.full(n, self.side, dtype=np.int64)
        if self.frame == "chart":
            xs = np.empty(n)
            ys = np.empty(n)
            for k in range(n):
                xs[k], ys[k] = _from_chart(c[k, 0], c[k, 1], P, C)
        else:
            _, u = to_states(sides, np.mod(c, 1.0), system.surface)
            xs, ys = u[:, 0], u[:, 1]
        os_, ox, oy = np.empty_like(sides), np.empty(n), np.empty(n)
        st = np.empty(n, dtype=np.int64)
        _canon_many(sides, np.ascontiguousarray(xs), np.ascontiguousarray(ys), P, C, os_, ox, oy, st)
        if np.any(st):
            raise SurfaceError("continuum enters a removed disk")
        return os_, np.column_stack([ox, oy])

    # constructors ---------------------------------------------------------
    @classmethod
    def segment(cls, start, end, refine_threshold, frame="chart", side=1, pieces: int = 1):
        a = np.asarray(start, dtype=float)
        b = np.asarray(end, dtype=float)
        t = np.linspace(0.0, 1.0, pieces + 1)[:, None]
        return cls(a * (1 - t) + b * t, refine_threshold, frame, side)

    @classmethod
    def circle_arc(cls, radius, theta0, arc_length, refine_threshold, side=1, pieces: int = 32):
        th = theta0 + np.linspace(0.0, arc_length / radius, pieces + 1)
        return cls(np.column_stack([radius * np.cos(th), radius * np.sin(th)]),
                   refine_threshold, "chart", side)

    @classmethod
    def singleton(cls, point, frame="chart", side=1):
        return cls(np.asarray(point, dtype=float).reshape(1, 2), 1.0, frame, side)


@dataclass(frozen=True)
class TrackReport:
    max_diam: float
    argmax_n: int
    refinement_count: int
    budget: tuple[int, int]
    status: str = OK
    initial_diam: float = 0.0
    final_vertices: int = 0
    final_params: tuple = ()  # (backward params, forward params)

    def to_dict(self) -> dict:
        return {"max_diam": self.max_diam, "argmax_n": self.argmax_n,
                "refinement_count": self.refinement_count, "budget": list(self.budget),
                "status": self.status, "initial_diam": self.initial_diam,
                "final_vertices": self.final_vertices}


def _refine(system, C, params, sides, pts, n, forward, budget):
    """Bisect parameters until adjacent images are within the threshold."""
    count = 0
    while True:
        gaps = system.gaps(sides, pts)
        bad = np.flatnonzero(gaps > C.refine_threshold)
        if bad.size == 0:
            return params, sides, pts, count, True
        if params.shape[0] + bad.size > budget:
            return params, sides, pts, count, False
        mids = 0.5 * (params[bad] + params[bad + 1])
        if np.any((mids == params[bad]) | (mids == params[bad + 1])):
            # parameter resolution exhausted: the image is discontinuous
            return params, sides, pts, count, False
        ms, mp = C.states_at(mids, system)
        ms, mp = system.iterate(ms, mp, n, forward)
        order = np.argsort(np.concatenate([params, mids]), kind="stable")
        params = np.concatenate([params, mids])[order]
        sides = np.concatenate([sides, ms])[order]
        pts = np.concatenate([pts, mp])[order]
        count += bad.size


def track_continuum(system: System, C: ContinuumSample, n_back: int, n_fwd: int,
                    vertex_budget: int = 100_000, stop_above: float | None = None) -> TrackReport:
    """Iterate a polyline continuum through ``[-n_back, n_fwd]``.

    The vertex set of each image is refined (midpoints re-iterated from the
    original polyline) until adjacent images are within the refine
    threshold. ``max_diam`` is the largest vertex-set diameter seen. If the
    vertex budget is hit the report is ``inconclusive``; with ``stop_above``
    tracking halts (status ``stopped``) as soon as that diameter is exceeded.
    """
    if n_back < 0 or n_fwd < 0:
        raise ValueError("budgets must be >= 0")
    params0 = np.arange(C.vertices.shape[0], dtype=float)
    s0, p0 = C.states_at(params0, system)
    params0, s0, p0, refinements, ok = _refine(system, C, params0, s0, p0, 0, True, vertex_budget)
    diam0 = system.diameter(s0, p0)
    max_diam, argmax = diam0, 0
    status = OK if ok else INCONCLUSIVE
    finals = [params0, params0]
    for k, (forward, steps) in enumerate(((False, n_back), (True, n_fwd))):
        if status != OK:
            break
        params, sides, pts = params0, s0, p0
        for n in range(1, steps + 1):
            sides, pts = system.step(sides, pts, forward)
            params, sides, pts, c, ok = _refine(system, C, params, sides, pts, n, forward, vertex_budget)
            refinements += c
            if not ok:
                status = INCONCLUSIVE
                break
            d = system.diameter(sides, pts)
            if d > max_diam:
                max_diam, argmax = d, (n if forward else -n)
            if stop_above is not None and max_diam > stop_above:
                status = STOPPED
                break
        finals[1 if forward else 0] = params
        if status == STOPPED:
            break
    nverts = max(finals[0].shape[0], finals[1].shape[0])
    return TrackReport(float(max_diam), int(argmax), int(refinements), (int(n_back), int(n_fwd)),
                       status, float(diam0), int(nverts), (tuple(finals[0]), tuple(finals[1])))


def retrack(system: System, C: ContinuumSample, report: TrackReport) -> float:
    """Max diameter from re-iterating the final refined parameter sets, no refinement."""
    best = 0.0
    for forward, params, steps in ((False, report.final_params[0], report.budget[0]),
                                   (True, report.final_params[1], report.budget[1])):
        sides, pts = C.states_at(np.asarray(params), system)
        best = max(best, system.diameter(sides, pts))
        for _ in range(steps):
            sides, pts = system.step(sides, pts, forward)
            best = max(best, system.diameter(sides, pts))
    return best


# -------------------------------------------------------------- falsifier

@dataclass(frozen=True)
class Candidate:
    trial: int
    location: str
    orientation: str
    centre: tuple[float, float]
    length: float
    report: TrackReport

    def to_dict(self) -> dict:
        return {"trial": self.trial, "location": self.location, "orientation": self.orientation,
                "centre": list(self.centre), "length": self.length, "report": self.report.to_dict()}


#: angles of annulus trials are drawn from this lattice (it contains +-pi/2)
ANGLE_LATTICE = 16


def _lattice_direction(k: int, lattice: int = ANGLE_LATTICE) -> np.ndarray:
    """Unit vector at angle 2 pi k / lattice, exact on the coordinate axes."""
    k %= lattice
    if 4 * k % lattice == 0:
        return np.array([(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][4 * k // lattice])
    t = 2 * math.pi * k / lattice
    return np.array([math.cos(t), math.sin(t)])


def _trial_continuum(i, rng, eta, surface: Surface):
    """The i-th random continuum: annulus, torus-1 or torus-2 by i mod 3."""
    scale = surface.da.chart_scale
    loc = ("annulus", "torus1", "torus2")[i % 3]
    orient = ("radial", "tangential", "random")[int(rng.integers(3))]
    ref = 0.25 * eta
    if loc == "annulus":
        k = int(rng.integers(ANGLE_LATTICE))
        theta = 2 * math.pi * k / ANGLE_LATTICE
        length = float(rng.uniform(0.2, 1.0)) * min(1.0, 0.5 * eta / scale)
        e = _lattice_direction(k)
        if orient == "radial":
            r0 = float(rng.uniform(0.5, 2.0 - length))
            C = ContinuumSample.segment(r0 * e, (r0 + length) * e, ref, "chart", 1, 4)
            centre = tuple((r0 + 0.5 * length) * e)
        elif orient == "tangential":
            r0 = float(rng.uniform(0.5, 2.0))
            C = ContinuumSample.circle_arc(r0, theta, length, ref, 1, 16)
            centre = tuple(r0 * e)
        else:
            r0 = float(rng.uniform(0.5 + 0.5 * length, 2.0 - 0.5 * length))
            phi = float(rng.uniform(0, 2 * math.pi))
            d = 0.5 * length * np.array([math.cos(phi), math.sin(phi)])
            C = ContinuumSample.segment(r0 * e - d, r0 * e + d, ref, "chart", 1, 4)
            centre = tuple(r0 * e)
        return loc, orient, centre, length, C
    side = 1 if loc == "torus1" else 2
    P, _, _, _, Ca = surface.arrays()
    while True:
        c = rng.random(2)
        if _radius(*_to_u(c[0], c[1], P), Ca) > 3.0:
            break
    length = float(rng.uniform(0.25, 0.5)) * eta
    phi = float(rng.uniform(0, 2 * math.pi))
    if orient == "radial":
        phi = 0.0  # along the first torus axis
    elif orient == "tangential":
        phi = 0.5 * math.pi
    d = 0.5 * length * np.array([math.cos(phi), math.sin(phi)])
    C = ContinuumSample.segment(c - d, c + d, ref, "torus", side, 4)
    return loc, orient, (float(c[0]), float(c[1])), length, C


def falsify_cwe(system: System, eta: float, trials: int = 1000, seed: int = 0,
                budgets: tuple[int, int] = (40, 40), vertex_budget: int = 100_000) -> list[Candidate]:
    """Search for continua whose iterates all stay within diameter ``eta``.

    Trials cycle through the handle annulus and both tori. Returned
    candidates are the trials with ``max_diam <= eta`` that were tracked to
    the full budget (inconclusive trials are never counted), in trial order.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(trials):
        loc, orient, centre, length, C = _trial_continuum(i, rng, eta, system.surface)
        rep = track_continuum(system, C, budgets[0], budgets[1], vertex_budget, stop_above=eta)
        if rep.status == OK and rep.max_diam <= eta:
            out.append(Candidate(i, loc, orient, centre, length, rep))
    return out


# ------------------------------------------------------------------ Gamma

@dataclass(frozen=True)
class GammaReport:
    center: tuple
    eta: float
    horizon: int
    pitch: float
    survivors: np.ndarray  # (k, 2) grid offsets (i, j) of survivors
    component_estimate: int
    linking_radius: float

    @property
    def count(self) -> int:
        return int(self.survivors.shape[0])

    def to_dict(self) -> dict:
        return {"center": list(self.center), "eta": self.eta, "horizon": self.horizon,
                "pitch": self.pitch, "survivor_count": self.count,
                "component_estimate": self.component_estimate,
                "linking_radius": self.linking_radius}


def _components(idx: np.ndarray, link: float) -> int:
    if idx.shape[0] == 0:
        return 0
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    from scipy.spatial import cKDTree

    pairs = cKDTree(idx.astype(float)).query_pairs(link, output_type="ndarray")
    n = idx.shape[0]
    g = coo_matrix((np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return int(connected_components(g, directed=False)[0])


def gamma_sample(system: System, center, eta: float, horizon: int, grid_resolution: int = 100,
                 side: int = 1, frame: str = "torus") -> GammaReport:
    """Grid approximation of Gamma_eta(center) = W^s_eta ∩ W^u_eta.

    The grid has pitch ``2 eta / grid_resolution`` and is centred on
    ``center`` (torus coordinates on ``side`` for the surface, plane
    coordinates for the plane saddle), restricted to the eta-ball. With
    ``frame="chart"`` the centre is given in chart coordinates and the grid
    axes are the chart's unstable and stable directions (pitch still in
    torus units), so grid rows through an axis point stay exactly on it. A grid
    point survives if its orbit stays within eta of the centre's orbit for
    ``|n| <= horizon``. Survivors are clustered by single linkage at twice
    the pitch.
    """
    if not eta > 0 or horizon < 1:
        raise ValueError("need eta > 0 and horizon >= 1")
    if frame not in ("torus", "chart"):
        raise ValueError("frame must be 'torus' or 'chart'")
    half = grid_resolution // 2
    pitch = eta / half if half else eta
    ii, jj = np.meshgrid(np.arange(-half, half + 1), np.arange(-half, half + 1), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    inball = ii * ii + jj * jj <= half * half
    ii, jj = ii[inball], jj[inball]
    c = np.asarray(center, dtype=float)
    raw = np.column_stack([c[0] + ii * pitch, c[1] + jj * pitch])
    if system.kind == "plane":
        sides = np.zeros(raw.shape[0], dtype=np.int64)
        pts = raw
        cs, cp = np.zeros(1, dtype=np.int64), c.reshape(1, 2)
    else:
        P, _, _, _, Ca = system.surface.arrays()
        sd = np.full(raw.shape[0], side, dtype=np.int64)
        if frame == "chart":
            s0 = system.surface.da.chart_scale
            xs = np.ascontiguousarray(c[0] * s0 + ii * pitch)
            ys = np.ascontiguousarray(c[1] * s0 + jj * pitch)
        else:
            sd, u = to_states(sd, np.mod(raw, 1.0), system.surface)
            xs, ys = np.ascontiguousarray(u[:, 0]), np.ascontiguousarray(u[:, 1])
        sides, ox, oy = np.empty_like(sd), np.empty_like(xs), np.empty_like(ys)
        st = np.empty(raw.shape[0], dtype=np.int64)
        _canon_many(sd, xs, ys, P, Ca, sides, ox, oy, st)
        legal = st == 0
        ii, jj, sides = ii[legal], jj[legal], sides[legal]
        pts = np.column_stack([ox, oy])[legal]
        k0 = int(np.flatnonzero((ii == 0) & (jj == 0))[0])
        cs, cp = sides[k0:k0 + 1].copy(), pts[k0:k0 + 1].copy()
    alive = np.ones(pts.shape[0], dtype=bool)
    for forward in (True, False):
        s, p = sides.copy(), pts.copy()
        zs, zp = cs.copy(), cp.copy()
        live = np.flatnonzero(alive)
        s, p = s[live], p[live]
        for _ in range(horizon):
            if live.size == 0:
                break
            zs, zp = system.step(zs, zp, forward)
            s, p = system.step(s, p, forward)
            d = system.dist_to(zs[0], zp[0], s, p)
            keep = d <= eta
            alive[live[~keep]] = False
            live, s, p = live[keep], s[keep], p[keep]
    idx = np.column_stack([ii, jj])[alive]
    return GammaReport(tuple(float(v) for v in c), float(eta), int(horizon), float(pitch), idx,
                       _components(idx, 2.0), 2.0 * pitch)


@dataclass(frozen=True)
class CardinalityHit:
    target: int
    center: tuple
    side: int
    frame: str
    eta: float
    survivors: int
    components: int

    def to_dict(self) -> dict:
        return {"target": self.target, "center": list(self.center), "side": self.side,
                "frame": self.frame, "eta": self.eta, "survivors": self.survivors,
                "components": self.components}


def e_conjugate_points(surface: Surface, count: int = 8) -> list[tuple[float, float]]:
    """Torus-1 images of points on the inserted copy of E (segment tops and base)."""
    from .torus_da import SaddleInsertion

    ins: SaddleInsertion = surface.insertion
    plane = [(0.75, 0.375), (0.5, 0.25), (0.625, 0.3), (0.75, 0.0), (0.5625, 0.5),
             (0.375, 0.2), (0.5, 0.5), (0.75, 0.7)][:count]
    return [tuple(ins.to_torus(X, Y, surface.da)) for X, Y in plane]


#: handle points on the stable axis (side-1 chart), then E-conjugates (torus)
def default_cardinality_centers(surface: Surface) -> list[tuple[tuple, int, str]]:
    out = [((0.0, 1.5), 1, "chart"), ((0.0, 1.0), 1, "chart"), ((0.0, -1.5), 1, "chart")]
    out += [(c, 1, "torus") for c in e_conjugate_points(surface)]
    return out


def cardinality_search(system: System, targets=(2, 5, 10, 20), centers=None,
                       etas=(0.005, 0.01, 0.02, 0.05), horizon: int = 40,
                       grid_resolution: int = 100) -> dict[int, CardinalityHit | None]:
    """For each target N find (x, eta) with at least N Gamma survivors.

    ``centers`` are ``(point, side, frame)`` triples (see :func:`gamma_sample`).
    The default scans stable-axis points of the handle first, where whole
    arcs of the axis shadow each other in both time directions, then points
    on the inserted copy of E. Exploratory: a miss is reported as ``None``.
    The grid pitch is eta/50 at the default resolution.
    """
    centers = centers if centers is not None else default_cardinality_centers(system.surface)
    hits: dict[int, CardinalityHit | None] = {int(n): None for n in targets}
    for eta in etas:
        for c, side, frame in centers:
            if all(h is not None for h in hits.values()):
                return hits
            rep = gamma_sample(system, c, eta, horizon, grid_resolution, side, frame)
            for n in hits:
                if hits[n] is None and rep.count >= n:
                    hits[n] = CardinalityHit(n, tuple(float(v) for v in c), side, frame, float(eta),
                                             rep.count, rep.component_estimate)
    return hits


# --------------------------------------------------- stable partition, spines

@dataclass(frozen=True)
class PartitionSample:
    points: np.ndarray  # side-1 chart coordinates
    labels: np.ndarray  # -1 = unresolved
    horizon: int
    tolerance: float

    @property
    def n_labels(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


def stable_partition_sample(system: System, resolution: int = 60, horizon: int = 12,
                            tolerance: float = 1e-3, landmarks: int = 400,
                            points=None) -> PartitionSample:
    """Label annulus points by forward asymptotics.

    Two points share a label when their ``horizon``-th forward images are
    within ``tolerance`` (the truncated forward-orbit pseudo-metric). Labels
    are landmark based: points are visited in grid order, and each is
    joined to the first landmark within tolerance or becomes a new landmark
    while fewer than ``landmarks`` exist; otherwise it is ``-1``
    (unresolved).
    """
    surf = system.surface
    if points is None:
        g = np.linspace(-2.0, 2.0, resolution)
        X, Y = np.meshgrid(g, g, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        r = np.hypot(pts[:, 0], pts[:, 1])
        pts = pts[(r >= 0.5) & (r <= 2.0)]
    else:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
    C = ContinuumSample(pts, 1.0, "chart", 1)
    sides, tp = C.states_at(np.arange(pts.shape[0], dtype=float), system)
    sides, tp = system.iterate(sides, tp, horizon, True)
    labels = np.full(pts.shape[0], -1, dtype=np.int64)
    reps: list[int] = []
    for k in range(pts.shape[0]):
        if reps:
            idx = np.asarray(reps)
            d = system.dist_to(sides[k], tp[k], sides[idx], tp[idx])
            j = int(np.argmin(d))
            if d[j] <= tolerance:
                labels[k] = labels[idx[j]]
                continue
        if len(reps) < landmarks:
            labels[k] = len(reps)
            reps.append(k)
    return PartitionSample(pts, labels, int(horizon), float(tolerance))


def _grid_labels(mask: np.ndarray) -> int:
    from scipy import ndimage

    _, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    return int(n)


def e_components(center=(0.5, 0.25), radius: float = 0.2, pitch: float = 1e-3) -> int:
    """Grid-connectivity component count of E inside the ball B(center, radius).

    A grid cell is marked when rho at its centre is at most half a pitch
    (so every segment crossing the cell marks it); marked cells are joined
    by 8-connectivity.
    """
    from .eset import rho_many

    n = int(round(2 * radius / pitch))
    g = (np.arange(n) + 0.5) * pitch - radius
    X, Y = np.meshgrid(center[0] + g, center[1] + g, indexing="ij")
    inside = np.hypot(X - center[0], Y - center[1]) <= radius
    d, _ = rho_many(np.column_stack([X.ravel(), Y.ravel()]))
    mask = (d.reshape(X.shape) <= 0.5 * pitch) & inside
    return _grid_labels(mask)


def spine_probe(center, eta: float, pitch: float) -> dict:
    """Does E separate the eta-ball around a plane point? (1-prong test)

    Returns the number of components of the ball minus the marked E cells.
    A spine (e.g. the top of a segment) leaves a single component.
    """
    from .eset import rho_many

    n = int(round(2 * eta / pitch))
    g = (np.arange(n) + 0.5) * pitch - eta
    X, Y = np.meshgrid(center[0] + g, center[1] + g, indexing="ij")
    inside = np.hypot(X - center[0], Y - center[1]) <= eta
    d, _ = rho_many(np.column_stack([X.ravel(), Y.ravel()]))
    # half a cell diagonal: every cell a segment passes through is marked
    stable = (d.reshape(X.shape) <= 0.5 * math.sqrt(2.0) * pitch) & inside
    rest = inside & ~stable
    from scipy import ndimage

    _, k = ndimage.label(rest)  # 4-connectivity: a marked line blocks passage
    return {"center": [float(center[0]), float(center[1])], "eta": eta, "pitch": pitch,
            "stable_cells": int(stable.sum()), "complement_components": int(k)}


def rho_at(p) -> float:
    return float(_rho(float(p[0]), float(p[1]))[0])


__all__ = [
    "System", "ContinuumSample", "TrackReport", "track_continuum", "retrack", "falsify_cwe",
    "Candidate", "GammaReport", "gamma_sample", "cardinality_search", "CardinalityHit",
    "stable_partition_sample", "PartitionSample", "e_components", "spine_probe", "Side",
]
