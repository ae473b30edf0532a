"""The genus-two surface obtained by gluing two punctured tori along an annulus.

Side 1 carries the anomalous DA f1, side 2 the inverse f2 of the standard DA.
Both tori use the same chart at their repelling fixed point (``chart``
coordinates: rotated torus coordinates divided by the chart scale). The disks
of chart radius < 1/2 are removed and the annulus 1/2 <= |x| <= 2 of side 1
is identified with that of side 2 by the inversion ``psi(x) = x / |x|**2``.

Canonical representatives have chart radius >= 1 on either side; radius
exactly 1 (the seam, fixed by psi) is stored on side 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .flow import IntegratorConfig
from .torus_da import (_ESX, _ESY, _EUX, _EUY, DAConfig, DAError, SaddleInsertion, TorusPoint,
                       _anom_fwd_u, _anom_inv_u, _da_fwd_u, _da_inv_u, _from_u, _iparams,
                       _norm_u, _to_u, default_config, torus_distance)

FORWARD = "forward"
INVERSE = "inverse"

# legality slack for radius 1/2 under rounding
_LEGAL = 0.5 * (1.0 - 1e-9)
# chart radii this close to 1 count as the seam (stored on side 1)
_SEAM = 1e-12

_OK, _BUDGET, _NO_CONVERGENCE, _ILLEGAL = 0, 1, 2, 3


class Side(enum.IntEnum):
    T1 = 1
    T2 = 2


class SurfaceError(RuntimeError):
    """Illegal surface point or a map image inside a removed disk."""


@dataclass(frozen=True)
class SurfacePoint:
    side: Side
    point: TorusPoint

    def __post_init__(self):
        object.__setattr__(self, "side", Side(int(self.side)))
        if not isinstance(self.point, TorusPoint):
            object.__setattr__(self, "point", TorusPoint(*self.point))

    def as_tuple(self) -> tuple[int, float, float]:
        return int(self.side), self.point.x, self.point.y


def _gamma_profile(r):
    return math.sin(math.pi * (r - 0.5) / 1.5) ** 2


@dataclass(frozen=True)
class PerturbationConfig:
    """Annulus perturbation P, supported on 1/2 < r < 2 of the side-1 chart.

    In polar chart coordinates P first twists the angle,
    ``theta' = theta + eps*gamma(r)*sin(k*theta)``, then shears the radius,
    ``r' = r + eps*gamma(r)*sin(k*theta')``, with
    ``gamma(r) = sin^2(pi (r - 1/2) / 1.5)``. ``twist=False`` keeps only the
    radial shear.
    """

    amplitude: float = 0.02
    mode: int = 3
    twist: bool = True

    @property
    def max_gamma_slope(self) -> float:
        return math.pi / 1.5

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.amplitude * self.max_gamma_slope >= 1.0:
            raise ValueError("eps * max|gamma'| must be < 1 for the radial shear to be injective")
        if self.twist and self.amplitude * abs(self.mode) >= 1.0:
            raise ValueError("eps * k must be < 1 for the angular twist to be injective")

    def params(self) -> np.ndarray:
        return np.array([self.amplitude, float(self.mode), 1.0 if self.twist else 0.0])


@dataclass(frozen=True)
class Surface:
    """Everything needed to step points of the glued surface."""

    da: DAConfig = field(default_factory=default_config)
    insertion: SaddleInsertion = field(default_factory=SaddleInsertion)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)

    def arrays(self):
        return (self.da.params(), self.insertion.params(self.da), _iparams(self.insertion.integrator),
                self.perturbation.params(), np.array([self.da.chart_scale]))


_DEFAULT_SURFACE = None


def default_surface() -> Surface:
    global _DEFAULT_SURFACE
    if _DEFAULT_SURFACE is None:
        _DEFAULT_SURFACE = Surface()
    return _DEFAULT_SURFACE


# ------------------------------------------------------------------ kernels
#
# Kernel states are (side, u1, u2): rotated coordinates of the representative
# in the wrapped unit square. Unlike [0, 1) torus coordinates they hold points
# of the stable axis u1 = 0 exactly, which every map here preserves.

@njit
def _psi(c1, c2):
    r2 = c1 * c1 + c2 * c2
    return c1 / r2, c2 / r2


@njit
def _chart(u1, u2, C):
    return u1 / C[0], u2 / C[0]


@njit
def _from_chart(c1, c2, P, C):
    return _norm_u(c1 * C[0], c2 * C[0], P)


@njit
def _radius(u1, u2, C):
    return math.hypot(u1, u2) / C[0]


@njit
def _switch(u1, u2, P, C):
    """The other side's representative (psi in the chart)."""
    c1, c2 = _chart(u1, u2, C)
    d1, d2 = _psi(c1, c2)
    return _from_chart(d1, d2, P, C)


@njit
def _canon(side, u1, u2, P, C):
    r = _radius(u1, u2, C)
    if r < _LEGAL:
        return side, u1, u2, _ILLEGAL
    if abs(r - 1.0) <= _SEAM:
        if side == 1:
            return side, u1, u2, _OK
        a, b = _switch(u1, u2, P, C)
        return 1, a, b, _OK
    if r < 1.0:
        a, b = _switch(u1, u2, P, C)
        return 3 - side, a, b, _OK
    return side, u1, u2, _OK


@njit
def _gamma(r):
    if r <= 0.5 or r >= 2.0:
        return 0.0
    s = math.sin(math.pi * (r - 0.5) / 1.5)
    return s * s


@njit
def _perturb(c1, c2, Q, fwd):
    eps = Q[0]
    k = Q[1]
    r = math.hypot(c1, c2)
    if eps == 0.0 or r <= 0.5 or r >= 2.0:
        return c1, c2, _OK
    th = math.atan2(c2, c1)
    if fwd:
        gm = _gamma(r)
        if Q[2] != 0.0:
            th = th + eps * gm * math.sin(k * th)
        rn = r + eps * gm * math.sin(k * th)
        return rn * math.cos(th), rn * math.sin(th), _OK
    # inverse: radius first (theta' is known), then angle
    sk = math.sin(k * th)
    lo, hi = 0.5, 2.0
    st = _NO_CONVERGENCE
    rr = r
    for _ in range(200):
        rr = 0.5 * (lo + hi)
        v = rr + eps * _gamma(rr) * sk - r
        if v == 0.0 or rr == lo or rr == hi:
            st = _OK
            break
        if v < 0.0:
            lo = rr
        else:
            hi = rr
    if Q[2] != 0.0:
        gm = _gamma(rr)
        a = th - eps * gm - 1e-12
        b = th + eps * gm + 1e-12
        for _ in range(200):
            m = 0.5 * (a + b)
            v = m + eps * gm * math.sin(k * m) - th
            if v == 0.0 or m == a or m == b:
                break
            if v < 0.0:
                a = m
            else:
                b = m
        th = 0.5 * (a + b)
    return rr * math.cos(th), rr * math.sin(th), st


@njit
def _annulus_rep_t1(side, u1, u2, C):
    """Side-1 chart coordinates of an annulus class, or flag 0 if not in A."""
    c1, c2 = _chart(u1, u2, C)
    if math.hypot(c1, c2) > 2.0:
        return 0.0, 0.0, 0
    if side == 2:
        c1, c2 = _psi(c1, c2)
    return c1, c2, 1


@njit
def _surface_step(side, u1, u2, perturbed, fwd, P, S, I, Q, C):
    """One step of f (perturbed=0) or g (perturbed=1). Returns (side, u1, u2, status)."""
    if fwd:
        if perturbed:
            c1, c2, inA = _annulus_rep_t1(side, u1, u2, C)
            if inA:
                d1, d2, st = _perturb(c1, c2, Q, True)
                u1, u2 = _from_chart(d1, d2, P, C)
                side = 1
        if side == 2 and _radius(u1, u2, C) <= 2.0:
            u1, u2 = _switch(u1, u2, P, C)
            side = 1
        if side == 1:
            a, b, st = _anom_fwd_u(u1, u2, P, S, I)
        else:
            a, b, st = _da_inv_u(u1, u2, P)
        if st != _OK:
            return side, a, b, st
        return _canon(side, a, b, P, C)
    if side == 1 and _radius(u1, u2, C) <= 2.0:
        u1, u2 = _switch(u1, u2, P, C)
        side = 2
    if side == 2:
        a, b = _da_fwd_u(u1, u2, P)
        st = _OK
    else:
        a, b, st = _anom_inv_u(u1, u2, P, S, I)
    if st != _OK:
        return side, a, b, st
    side, a, b, st = _canon(side, a, b, P, C)
    if perturbed and st == _OK:
        c1, c2, inA = _annulus_rep_t1(side, a, b, C)
        if inA:
            d1, d2, st = _perturb(c1, c2, Q, False)
            a, b = _from_chart(d1, d2, P, C)
            side, a, b, st2 = _canon(1, a, b, P, C)
            st = max(st, st2)
    return side, a, b, st


@njit
def _step_many(sides, u1s, u2s, perturbed, fwd, P, S, I, Q, C, out_side, out_1, out_2, out_st):
    for k in range(u1s.shape[0]):
        s, a, b, st = _surface_step(sides[k], u1s[k], u2s[k], perturbed, fwd, P, S, I, Q, C)
        out_side[k] = s
        out_1[k] = a
        out_2[k] = b
        out_st[k] = st


@njit
def _torus_gap(a1, a2, b1, b2, P):
    # torus distance between two rotated-coordinate points
    d1 = a1 - b1
    d2 = a2 - b2
    dx = P[_EUX] * d1 + P[_ESX] * d2
    dy = P[_EUY] * d1 + P[_ESY] * d2
    dx -= math.floor(dx + 0.5)
    dy -= math.floor(dy + 0.5)
    return math.hypot(dx, dy)


@njit
def _distance(s1, a1, a2, s2, b1, b2, P, C):
    """Surface distance surrogate in torus units (see :func:`surface_distance`)."""
    if s1 != s2:
        # move an annulus point across, if either is one
        if _radius(a1, a2, C) <= 2.0:
            a1, a2 = _switch(a1, a2, P, C)
            s1 = s2
        elif _radius(b1, b2, C) <= 2.0:
            b1, b2 = _switch(b1, b2, P, C)
            s2 = s1
    if s1 == s2:
        return _torus_gap(a1, a2, b1, b2, P)
    # through the seam: best of the two seam points on the rays of the ends
    best = math.inf
    for which in range(2):
        c1, c2 = _chart(a1, a2, C) if which == 0 else _chart(b1, b2, C)
        n = math.hypot(c1, c2)
        m1, m2 = _from_chart(c1 / n, c2 / n, P, C)
        d = _torus_gap(a1, a2, m1, m2, P) + _torus_gap(b1, b2, m1, m2, P)
        best = min(best, d)
    return best


@njit
def _distances_to(s0, a1, a2, sides, u1s, u2s, P, C, out):
    for k in range(u1s.shape[0]):
        out[k] = _distance(s0, a1, a2, sides[k], u1s[k], u2s[k], P, C)


@njit
def _to_u_many(xs, ys, P, out1, out2):
    for k in range(xs.shape[0]):
        out1[k], out2[k] = _to_u(xs[k], ys[k], P)


@njit
def _from_u_many(u1s, u2s, P, outx, outy):
    for k in range(u1s.shape[0]):
        outx[k], outy[k] = _from_u(u1s[k], u2s[k], P)


# ------------------------------------------------------------------- public

def psi_invert(x) -> tuple[float, float]:
    """The inversion ``x / |x|**2`` of the punctured plane."""
    c1, c2 = float(x[0]), float(x[1])
    if c1 == 0.0 and c2 == 0.0:
        raise ValueError("psi is undefined at the origin")
    return _psi(c1, c2)


def _status(st, what):
    if st == _ILLEGAL:
        raise SurfaceError(f"{what}: chart radius below 1/2 (removed disk)")
    if st == _BUDGET:
        raise DAError(f"{what}: integrator budget exhausted")
    if st == _NO_CONVERGENCE:
        raise DAError(f"{what}: inverse did not converge")


def _u_of(sp: SurfacePoint, P):
    return _to_u(float(sp.point.x), float(sp.point.y), P)


def _point(side, u1, u2, P) -> SurfacePoint:
    return SurfacePoint(Side(int(side)), TorusPoint(*_from_u(u1, u2, P)))


def to_states(sides, points, surface: Surface | None = None):
    """Kernel states ``(sides, u)`` of torus points; ``u`` is ``(n, 2)`` rotated coordinates."""
    surface = surface or default_surface()
    P = surface.arrays()[0]
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    u1, u2 = np.empty(pts.shape[0]), np.empty(pts.shape[0])
    _to_u_many(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), P, u1, u2)
    return np.ascontiguousarray(sides, dtype=np.int64), np.column_stack([u1, u2])


def from_states(sides, u, surface: Surface | None = None):
    """Inverse of :func:`to_states`: ``(sides, points)`` with points in [0, 1)**2."""
    surface = surface or default_surface()
    P = surface.arrays()[0]
    u = np.asarray(u, dtype=float).reshape(-1, 2)
    x, y = np.empty(u.shape[0]), np.empty(u.shape[0])
    _from_u_many(np.ascontiguousarray(u[:, 0]), np.ascontiguousarray(u[:, 1]), P, x, y)
    return np.asarray(sides, dtype=np.int64), np.column_stack([x, y])


def chart_radius(sp: SurfacePoint, surface: Surface | None = None) -> float:
    surface = surface or default_surface()
    P, _, _, _, C = surface.arrays()
    return float(_radius(*_u_of(sp, P), C))


def from_chart(side, c, surface: Surface | None = None) -> SurfacePoint:
    """Surface point with chart coordinates ``c`` on the given side (not canonicalized)."""
    surface = surface or default_surface()
    P, _, _, _, C = surface.arrays()
    return _point(side, *_from_chart(float(c[0]), float(c[1]), P, C), P)


def to_chart(sp: SurfacePoint, surface: Surface | None = None) -> tuple[float, float]:
    surface = surface or default_surface()
    P, _, _, _, C = surface.arrays()
    return _chart(*_u_of(sp, P), C)


def canonicalize(sp: SurfacePoint, surface: Surface | None = None) -> SurfacePoint:
    """Canonical representative: chart radius >= 1, the seam stored on side 1."""
    surface = surface or default_surface()
    P, _, _, _, C = surface.arrays()
    u1, u2 = _u_of(sp, P)
    s, a, b, st = _canon(int(sp.side), u1, u2, P, C)
    _status(st, f"canonicalize {sp}")
    if s == int(sp.side) and a == u1 and b == u2:
        return sp  # already canonical; avoid a coordinate round trip
    return _point(s, a, b, P)


def glued_step(sp: SurfacePoint, map: str = "f", direction: str = FORWARD,
               surface: Surface | None = None) -> SurfacePoint:
    """One step of f or of the perturbed map g on the surface."""
    if map not in ("f", "g"):
        raise ValueError("map must be 'f' or 'g'")
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}")
    surface = surface or default_surface()
    P, S, I, Q, C = surface.arrays()
    s, a, b, st = _canon(int(sp.side), *_u_of(sp, P), P, C)
    _status(st, f"glued_step input {sp}")
    s, a, b, st = _surface_step(s, a, b, map == "g", direction == FORWARD, P, S, I, Q, C)
    _status(st, f"glued_step({map}, {direction}) at {sp}")
    return _point(s, a, b, P)


def step_many(sides, points, map: str = "f", direction: str = FORWARD,
              surface: Surface | None = None):
    """Vectorised :func:`glued_step` on canonical inputs; returns ``(sides, points, status)``."""
    surface = surface or default_surface()
    sides, u = to_states(sides, points, surface)
    os_, ou, st = step_states(sides, u, map, direction, surface)
    return (*from_states(os_, ou, surface), st)


def step_states(sides, u, map: str = "f", direction: str = FORWARD,
                surface: Surface | None = None):
    """:func:`step_many` on kernel states; returns ``(sides, u, status)``."""
    surface = surface or default_surface()
    P, S, I, Q, C = surface.arrays()
    sides = np.ascontiguousarray(sides, dtype=np.int64)
    u1, u2 = np.ascontiguousarray(u[:, 0]), np.ascontiguousarray(u[:, 1])
    os_, o1, o2 = np.empty_like(sides), np.empty_like(u1), np.empty_like(u2)
    st = np.empty(u1.shape[0], dtype=np.int64)
    _step_many(sides, u1, u2, map == "g", direction == FORWARD, P, S, I, Q, C, os_, o1, o2, st)
    return os_, np.column_stack([o1, o2]), st


def annulus_perturbation(x, cfg: PerturbationConfig | None = None,
                         direction: str = FORWARD) -> tuple[float, float]:
    """P (or P^-1) in side-1 chart coordinates; requires 1/2 <= |x| <= 2."""
    cfg = cfg or PerturbationConfig()
    c1, c2 = float(x[0]), float(x[1])
    r = math.hypot(c1, c2)
    if not (0.5 - _SEAM <= r <= 2.0 + _SEAM):
        raise ValueError(f"{tuple(x)} is outside the annulus 1/2 <= |x| <= 2")
    a, b, st = _perturb(c1, c2, cfg.params(), direction == FORWARD)
    _status(st, "annulus perturbation inverse")
    return a, b


def surface_distance(a: SurfacePoint, b: SurfacePoint, surface: Surface | None = None) -> float:
    """Distance surrogate on the glued surface, in torus units.

    Same side: torus distance. Different sides with one point in the
    annulus: torus distance after moving that point across by psi.
    Otherwise the shorter of two routes through seam points on the rays of
    the ends. This is a quasi-metric stand-in for the quotient metric,
    adequate at eta scale.
    """
    surface = surface or default_surface()
    P, _, _, _, C = surface.arrays()
    return float(_distance(int(a.side), *_u_of(a, P), int(b.side), *_u_of(b, P), P, C))


def seam_routes(x, surface: Surface | None = None) -> tuple[SurfacePoint, SurfacePoint]:
    """Images of the annulus class of side-1 chart point ``x`` by both chart routes.

    Side-1 route: the side-1 representative stepped by f1 (the anomalous DA,
    linear ``4x`` on the chart disk). Side-2 route: the representative
    ``psi(x)`` stepped by f2 (the standard DA inverse, ``y/4`` there) and
    carried back across by psi. They agree because ``psi(4x) = psi(x)/4``.
    """
    surface = surface or default_surface()
    P, S, I, _, C = surface.arrays()
    c1, c2 = float(x[0]), float(x[1])
    if not (0.5 <= math.hypot(c1, c2) <= 2.0):
        raise ValueError("x must lie in the annulus")
    t1 = _from_chart(c1, c2, P, C)
    a, b, st = _anom_fwd_u(t1[0], t1[1], P, S, I)
    _status(st, "side-1 route")
    s, a, b, st = _canon(1, a, b, P, C)
    _status(st, "side-1 route")
    one = _point(s, a, b, P)
    y1, y2 = _psi(c1, c2)
    t2 = _from_chart(y1, y2, P, C)
    a, b, st = _da_inv_u(t2[0], t2[1], P)
    _status(st, "side-2 route")
    # the image has chart radius < 1/2 on side 2, so only its side-1 copy is legal
    a, b = _switch(a, b, P, C)
    s, a, b, st = _canon(1, a, b, P, C)
    _status(st, "side-2 route")
    return one, _point(s, a, b, P)


def in_annulus(sp: SurfacePoint, surface: Surface | None = None) -> bool:
    return chart_radius(sp, surface) <= 2.0
