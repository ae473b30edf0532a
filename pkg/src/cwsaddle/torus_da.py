"""A derived-from-Anosov map of the torus, with an anomalous saddle inserted.

Construction (all in the rotated coordinates ``u = B^T (z - p)`` about the
fixed point p = 0, where the columns of B are the unstable and stable unit
eigenvectors of A, so the stable direction is the second axis)::

    F = Lambda o G2 o G1,   Lambda = diag(lam_u, lam_s)

* ``G1(u1, u2) = (tau_{d(u2)}(u1), u2)`` stretches the unstable coordinate
  by ``4/lam_u`` near p;
* ``G2(u1, u2) = (u1, sigma_{c(u1)}(u2))`` stretches the stable coordinate
  by ``4/lam_s`` near p and gives it contraction rate exactly 1/2 around
  the two new saddles ``q = (0, +-q2)``.

``tau_d = d*tau + (1-d)*id`` and ``sigma_c`` likewise are convex
combinations of increasing maps of a line, so both G's are homeomorphisms
that are the identity outside a box; on the chart disk the composite is
exactly ``u -> 4u``.

Near q the map is the skew product ``(X, Y) -> (X/2, lam_u Y)`` in the
coordinates ``X = (q2 - u2)/kappa``, ``Y = u1/kappa``. The anomalous version
replaces each fibre map by ``Phi_X``, which is the plane saddle f = phi_1 o T
on the inner rectangle and blends back to ``lam_u Y`` on a collar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .flow import BUDGET_EXHAUSTED, IntegratorConfig
from .saddle import _step as _saddle_step

FORWARD = "forward"
INVERSE = "inverse"
TO_TORUS = "to_torus"
TO_PLANE = "to_plane"

PROFILES = {"smoothstep": 0, "cosine": 1}

# status codes returned by the kernels
_OK, _BUDGET, _NO_CONVERGENCE = 0, 1, 2


class DAError(RuntimeError):
    """Inverse did not converge or an image violated the construction."""


def _wrap01(v: float) -> float:
    v = v % 1.0
    return 0.0 if v >= 1.0 else v


@dataclass(frozen=True)
class TorusPoint:
    """Point of R^2/Z^2, stored as its representative in [0, 1)^2."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _wrap01(float(self.x)))
        object.__setattr__(self, "y", _wrap01(float(self.y)))

    def __iter__(self):
        yield self.x
        yield self.y

    def __getitem__(self, k):
        return (self.x, self.y)[k]

    def distance(self, other) -> float:
        return torus_distance(self, other)


def torus_distance(a, b) -> float:
    """Distance on R^2/Z^2: minimum over integer translates."""
    dx = float(a[0]) - float(b[0])
    dy = float(a[1]) - float(b[1])
    dx -= round(dx)
    dy -= round(dy)
    return math.hypot(dx, dy)


@dataclass(frozen=True)
class DAConfig:
    """Parameters of the DA construction (lengths in torus units).

    The defaults make ``u -> 4u`` hold on the whole chart disk of radius
    ``chart_radius`` (torus radius ``chart_radius * chart_scale``), as the
    surface gluing needs, and keep every support box embedded in the torus.
    """

    anosov_matrix: tuple = ((2, 1), (1, 1))
    repeller_scale: float = 4.0
    chart_radius: float = 2.0
    chart_scale: float = 0.008
    #: largest chart radius accepted by chart_transport; 8 is where the
    #: inverse DA is still exactly x/4
    chart_limit: float = 8.0
    blend_profile: str = "smoothstep"
    #: tau is the identity beyond this |u1|
    bump_radius: float = 0.06
    #: d(u2) vanishes beyond this |u2|
    cut_radius: float = 0.04
    saddle_offset: float = 0.10
    saddle_zone: float = 0.05
    stable_support: float = 0.36
    collar_inner: float = 0.08
    collar_outer: float = 0.16

    def __post_init__(self):
        if self.blend_profile not in PROFILES:
            raise ValueError(f"blend_profile must be one of {sorted(PROFILES)}")
        m = np.asarray(self.anosov_matrix, dtype=float)
        if m.shape != (2, 2) or not np.array_equal(m, m.T) or round(np.linalg.det(m)) != 1 \
                or not np.array_equal(m, np.round(m)):
            raise ValueError("anosov_matrix must be a symmetric integer matrix with det 1")
        lu, ls = self.eigenvalues
        if not (lu > 1.0 > ls > 0.0):
            raise ValueError("anosov_matrix must be hyperbolic with positive eigenvalues")
        L = self.linear_radius
        a = self.repeller_scale / lu
        b = self.repeller_scale / ls
        q2, mz = self.saddle_offset, self.saddle_zone
        checks = [
            (self.chart_scale > 0 and self.chart_radius > 0, "chart sizes must be positive"),
            (a * L < self.bump_radius, "unstable stretch overruns bump_radius"),
            (L < self.cut_radius < q2 - mz, "need linear radius < cut_radius < saddle zone"),
            (b * L < self._sigma_aff(q2 - mz), "stable stretch overruns the saddle zone"),
            (self._sigma_aff(q2 + mz) < self.stable_support, "stable_support too small"),
            (max(a * L, self.bump_radius) <= self.collar_inner < self.collar_outer,
             "collar must contain the unstable bump"),
            (self.repeller_scale > 1, "repeller_scale must exceed 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)
        self._check_embedding(self.collar_outer, self.stable_support)
        self._check_embedding(lu * self.collar_outer, ls * self.stable_support)

    def _sigma_aff(self, u):
        return (self.saddle_offset + 0.5 * (u - self.saddle_offset)) / self.eigenvalues[1]

    def _check_embedding(self, h1, h2):
        # box |u1| <= h1, |u2| <= h2 must meet no integer translate of itself
        # and fit in the wrapped square
        B = self.basis
        corner = np.abs(B) @ np.array([h1, h2])
        if np.any(corner >= 0.5):
            raise ValueError(f"support box ({h1:.3g}, {h2:.3g}) does not fit the fundamental square")
        for i in range(-4, 5):
            for j in range(-4, 5):
                if i == j == 0:
                    continue
                c = B.T @ np.array([i, j], dtype=float)
                if abs(c[0]) <= 2 * h1 and abs(c[1]) <= 2 * h2:
                    raise ValueError("support box overlaps a translate of itself")

    @property
    def eigenvalues(self) -> tuple[float, float]:
        w = np.linalg.eigvalsh(np.asarray(self.anosov_matrix, dtype=float))
        return float(w[1]), float(w[0])

    @property
    def basis(self) -> np.ndarray:
        """Columns: unstable then stable unit eigenvector, det +1."""
        w, v = np.linalg.eigh(np.asarray(self.anosov_matrix, dtype=float))
        eu, es = v[:, 1], v[:, 0]
        if eu[0] < 0:
            eu = -eu
        B = np.column_stack([eu, es])
        if np.linalg.det(B) < 0:
            B[:, 1] = -B[:, 1]
        return B

    @property
    def linear_radius(self) -> float:
        return self.chart_radius * self.chart_scale

    def params(self) -> np.ndarray:
        lu, ls = self.eigenvalues
        B = self.basis
        A = np.asarray(self.anosov_matrix, dtype=float)
        Ainv = np.round(np.linalg.inv(A))
        return np.array([
            lu, ls, B[0, 0], B[1, 0], B[0, 1], B[1, 1],
            self.linear_radius, self.repeller_scale / lu, self.bump_radius, self.cut_radius,
            self.repeller_scale / ls, self.saddle_offset, self.saddle_zone, self.stable_support,
            self.collar_inner, self.collar_outer, float(PROFILES[self.blend_profile]),
            A[0, 0], A[0, 1], A[1, 0], A[1, 1],
            Ainv[0, 0], Ainv[0, 1], Ainv[1, 0], Ainv[1, 1],
            self.repeller_scale,
        ])

    @property
    def saddle_points(self) -> tuple[TorusPoint, TorusPoint]:
        """The saddles q and q' created on the stable line through p."""
        es = self.basis[:, 1]
        q = self.saddle_offset * es
        return TorusPoint(q[0], q[1]), TorusPoint(-q[0], -q[1])


# parameter slots
_LU, _LS, _EUX, _EUY, _ESX, _ESY, _LIN, _A, _R1, _RD, _B, _Q2, _M, _R2, _RC0, _RC1, _PROF = range(17)
_A00, _A01, _A10, _A11, _I00, _I01, _I10, _I11, _SCALE = range(17, 26)


@njit
def _profile(t, kind):
    """Blend weight: 1 at t <= 0, 0 at t >= 1, monotone between."""
    if t <= 0.0:
        return 1.0
    if t >= 1.0:
        return 0.0
    if kind == 1:
        return 0.5 * (1.0 + math.cos(math.pi * t))
    return 1.0 - t * t * (3.0 - 2.0 * t)


@njit
def _interp(t, v0, v1, kind):
    return v0 + (v1 - v0) * (1.0 - _profile(t, kind))


@njit
def _wrap(d):
    return d - math.floor(d + 0.5)


@njit
def _to_u(x, y, P):
    wx = _wrap(x)
    wy = _wrap(y)
    return P[_EUX] * wx + P[_EUY] * wy, P[_ESX] * wx + P[_ESY] * wy


@njit
def _from_u(u1, u2, P):
    x = P[_EUX] * u1 + P[_ESX] * u2
    y = P[_EUY] * u1 + P[_ESY] * u2
    x -= math.floor(x)
    y -= math.floor(y)
    if x >= 1.0:
        x = 0.0
    if y >= 1.0:
        y = 0.0
    return x, y


@njit
def _tau(u, P):
    s = abs(u)
    L = P[_LIN]
    if s <= L:
        v = P[_A] * s
    elif s < P[_R1]:
        v = _interp((s - L) / (P[_R1] - L), P[_A] * L, P[_R1], P[_PROF])
    else:
        v = s
    return v if u >= 0.0 else -v


@njit
def _sigma_aff(s, P):
    return (P[_Q2] + 0.5 * (s - P[_Q2])) / P[_LS]


@njit
def _sigma(u, P):
    s = abs(u)
    L = P[_LIN]
    lo = P[_Q2] - P[_M]
    hi = P[_Q2] + P[_M]
    if s <= L:
        v = P[_B] * s
    elif s < lo:
        v = _interp((s - L) / (lo - L), P[_B] * L, _sigma_aff(lo, P), P[_PROF])
    elif s <= hi:
        v = _sigma_aff(s, P)
    elif s < P[_R2]:
        v = _interp((s - hi) / (P[_R2] - hi), _sigma_aff(hi, P), P[_R2], P[_PROF])
    else:
        v = s
    return v if u >= 0.0 else -v


@njit
def _cut_d(u2, P):
    return _profile((abs(u2) - P[_LIN]) / (P[_RD] - P[_LIN]), P[_PROF])


@njit
def _cut_c(u1, P):
    return _profile((abs(u1) - P[_RC0]) / (P[_RC1] - P[_RC0]), P[_PROF])


@njit
def _g1(u1, u2, P):
    d = _cut_d(u2, P)
    if d == 0.0:
        return u1
    return d * _tau(u1, P) + (1.0 - d) * u1


@njit
def _g2(u1, u2, P):
    c = _cut_c(u1, P)
    if c == 0.0:
        return u2
    return c * _sigma(u2, P) + (1.0 - c) * u2


@njit
def _monotone_inverse(which, target, other, lo, hi, P):
    """Solve g(v) = target for increasing g on [lo, hi] by Illinois regula falsi.

    ``which`` 1 inverts v -> G1 first coordinate at fixed u2 = other, 2 inverts
    v -> G2 second coordinate at fixed u1 = other.
    """
    flo = (_g1(lo, other, P) if which == 1 else _g2(other, lo, P)) - target
    fhi = (_g1(hi, other, P) if which == 1 else _g2(other, hi, P)) - target
    if flo == 0.0:
        return lo, _OK
    if fhi == 0.0:
        return hi, _OK
    if flo > 0.0 or fhi < 0.0:
        return 0.5 * (lo + hi), _NO_CONVERGENCE
    side = 0
    for _ in range(200):
        v = (lo * fhi - hi * flo) / (fhi - flo)
        if not (lo < v < hi):
            v = 0.5 * (lo + hi)
        fv = (_g1(v, other, P) if which == 1 else _g2(other, v, P)) - target
        if fv == 0.0 or hi - lo <= 4e-17 * max(1.0, abs(v)):
            return v, _OK
        if fv < 0.0:
            lo, flo = v, fv
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = v, fv
            if side == 1:
                flo *= 0.5
            side = 1
    return 0.5 * (lo + hi), _OK


@njit
def _norm_u(u1, u2, P):
    """Rotated coordinates of the representative in the wrapped unit square.

    Left untouched when already canonical, so exact values (u1 == 0 on the
    stable axis) survive.
    """
    x = P[_EUX] * u1 + P[_ESX] * u2
    y = P[_EUY] * u1 + P[_ESY] * u2
    if -0.5 <= x < 0.5 and -0.5 <= y < 0.5:
        return u1, u2
    return _to_u(x, y, P)


@njit
def _linear_u(u1, u2, m00, m01, m10, m11, P):
    # an integer torus matrix applied in rotated coordinates
    x = P[_EUX] * u1 + P[_ESX] * u2
    y = P[_EUY] * u1 + P[_ESY] * u2
    return _to_u(m00 * x + m01 * y, m10 * x + m11 * y, P)


@njit
def _da_fwd_u(u1, u2, P):
    if math.hypot(u1, u2) <= P[_LIN]:
        s = P[_SCALE]
        return s * u1, s * u2
    if abs(u1) < P[_RC1] and abs(u2) < P[_R2]:
        v1 = _g1(u1, u2, P)
        v2 = _g2(v1, u2, P)
        return _norm_u(P[_LU] * v1, P[_LS] * v2, P)
    return _linear_u(u1, u2, P[_A00], P[_A01], P[_A10], P[_A11], P)


@njit
def _da_inv_u(u1, u2, P):
    """Returns (u1, u2, status)."""
    s = P[_SCALE]
    if math.hypot(u1, u2) <= s * P[_LIN]:
        return u1 / s, u2 / s, _OK
    if abs(u1) < P[_LU] * P[_RC1] and abs(u2) < P[_LS] * P[_R2]:
        v1 = u1 / P[_LU]
        v2 = u2 / P[_LS]
        # undo G2 (second coordinate, u1 = v1 untouched), then G1; both are
        # odd in the coordinate they move, so zero maps to zero exactly
        if v2 == 0.0:
            w2, st2 = 0.0, _OK
        else:
            w2, st2 = _monotone_inverse(2, v2, v1, -P[_R2], P[_R2], P)
        if v1 == 0.0:
            w1, st1 = 0.0, _OK
        else:
            w1, st1 = _monotone_inverse(1, v1, w2, -P[_RC1], P[_RC1], P)
        return w1, w2, max(st1, st2)
    a, b = _linear_u(u1, u2, P[_I00], P[_I01], P[_I10], P[_I11], P)
    return a, b, _OK


@njit
def _da_forward(x, y, P):
    u1, u2 = _to_u(x, y, P)
    a, b = _da_fwd_u(u1, u2, P)
    return _from_u(a, b, P)


@njit
def _da_inverse(x, y, P):
    u1, u2 = _to_u(x, y, P)
    a, b, st = _da_inv_u(u1, u2, P)
    x, y = _from_u(a, b, P)
    return x, y, st


# ---------------------------------------------------------------- insertion

@dataclass(frozen=True)
class SaddleInsertion:
    """Where and how the plane saddle replaces the linear fibres at q.

    Plane coordinates ``(X, Y)`` of the saddle sit at
    ``u = (kappa Y, q2 - kappa X)``: the saddle's contracting horizontal is
    the stable line through q, with X > 0 pointing towards p.

    * inner rectangle ``|X| <= x_inner, 0 <= Y <= y_inner``: exactly the
      conjugated saddle (it contains [0, 1]^2, hence E);
    * ``R_q``: ``|X| <= x_outer, |Y| <= y_outer``; outside it the map is the DA;
    * collar: the fibre map blends to ``lam_u Y`` with weight
      ``w(X)`` = blend profile of the scaled depth past ``x_inner``, and
      monotone interpolation in Y. Below Y = 0 the saddle's attracting
      half-plane is not copied (it would be an open basin of q); the fibre
      interpolates from ``-lam_u y_outer`` to the saddle value at Y = 0.
    """

    kappa: float = 0.02
    x_inner: float = 1.25
    y_inner: float = 1.25
    x_outer: float = 2.0
    y_outer: float = 4.0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if not (0 < self.x_inner < self.x_outer and 0 < self.y_inner < self.y_outer and self.kappa > 0):
            raise ValueError("need 0 < inner < outer and kappa > 0")
        if self.x_outer > 2.0:
            # for 0 <= X <= 2 the point (X, 0) is mapped onto the base of E
            raise ValueError("x_outer must be <= 2")

    @property
    def collar_width(self) -> float:
        return self.kappa * (self.x_outer - self.x_inner)

    def check_against(self, cfg: DAConfig) -> None:
        k = self.kappa
        q2, mz = cfg.saddle_offset, cfg.saddle_zone
        if k * self.x_outer > mz:
            raise ValueError("R_q leaves the affine zone around q")
        if q2 - k * self.x_outer <= cfg.cut_radius:
            raise ValueError("R_q overlaps the repeller bump")
        if k * self.y_outer > cfg.collar_inner:
            raise ValueError("R_q is wider than the region where c(u1) = 1")

    def params(self, cfg: DAConfig) -> np.ndarray:
        self.check_against(cfg)
        return np.array([self.kappa, self.x_inner, self.y_inner, self.x_outer, self.y_outer,
                         cfg.saddle_offset, cfg.eigenvalues[0], float(PROFILES[cfg.blend_profile])])

    def to_torus(self, X, Y, cfg: DAConfig) -> TorusPoint:
        q2 = cfg.saddle_offset
        P = cfg.params()
        x, y = _from_u(self.kappa * float(Y), q2 - self.kappa * float(X), P)
        return TorusPoint(x, y)

    def to_plane(self, z, cfg: DAConfig) -> tuple[float, float]:
        u1, u2 = _to_u(float(z[0]), float(z[1]), cfg.params())
        return (cfg.saddle_offset - u2) / self.kappa, u1 / self.kappa


_KAP, _XIN, _YIN, _XOUT, _YOUT, _QQ, _LAMU, _IPROF = range(8)


@njit
def _saddle_y(X, Y, I):
    x, y, st = _saddle_step(X, Y, True, I[0], I[1], I[2], int(I[3]))
    return y, st


@njit
def _fibre(X, Y, S, I):
    """Phi_X(Y) and a status code."""
    lam = S[_LAMU]
    yo = S[_YOUT]
    ax = abs(X)
    if ax >= S[_XOUT] or abs(Y) >= yo:
        return lam * Y, _OK
    w = _profile((ax - S[_XIN]) / (S[_XOUT] - S[_XIN]), S[_IPROF])
    st = _OK
    if Y >= 0.0:
        if Y <= S[_YIN]:
            inner, st = _saddle_y(X, Y, I)
        else:
            top, st = _saddle_y(X, S[_YIN], I)
            inner = _interp((Y - S[_YIN]) / (yo - S[_YIN]), top, lam * yo, S[_IPROF])
    else:
        bottom, st = _saddle_y(X, 0.0, I)
        inner = _interp((Y + yo) / yo, -lam * yo, bottom, S[_IPROF])
    return w * inner + (1.0 - w) * lam * Y, st


@njit
def _fibre_inverse(X, target, S, I):
    lam = S[_LAMU]
    yo = S[_YOUT]
    if abs(X) >= S[_XOUT] or abs(target) >= lam * yo:
        return target / lam, _OK
    lo = -yo
    hi = yo
    flo = -lam * yo - target
    fhi = lam * yo - target
    if abs(X) <= S[_XIN] and target >= 0.0:
        # pure saddle fibre: invert f directly, then bracket that guess
        yy, _, _, st = _flow_back(X * 0.5, target, I)
        g = _t_inv_y(X * 0.5, yy)
        if st == _OK and 0.0 <= g <= S[_YIN]:
            delta = 1e-9 * (1.0 + abs(g))
            for _ in range(8):
                a = max(lo, g - delta)
                b = min(hi, g + delta)
                fa, sa = _fibre(X, a, S, I)
                fb, sb = _fibre(X, b, S, I)
                if sa != _OK or sb != _OK:
                    break
                fa -= target
                fb -= target
                if fa <= 0.0 <= fb:
                    lo, flo, hi, fhi = a, fa, b, fb
                    break
                delta *= 16.0
    return _illinois_fibre(X, target, lo, hi, flo, fhi, S, I)


@njit
def _illinois_fibre(X, target, lo, hi, flo, fhi, S, I):
    if flo == 0.0:
        return lo, _OK
    if fhi == 0.0:
        return hi, _OK
    side = 0
    v = 0.5 * (lo + hi)
    for _ in range(200):
        v = (lo * fhi - hi * flo) / (fhi - flo)
        if not (lo < v < hi):
            v = 0.5 * (lo + hi)
        fv, st = _fibre(X, v, S, I)
        if st != _OK:
            return v, st
        fv -= target
        if fv == 0.0 or hi - lo <= 4e-16 * max(1.0, abs(v)):
            return v, _OK
        if fv < 0.0:
            lo, flo = v, fv
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = v, fv
            if side == 1:
                flo *= 0.5
            side = 1
    return v, _NO_CONVERGENCE


from .flow import _flow_y  # noqa: E402  (kernel import placed next to its only user)
from .plmap import _t_inverse  # noqa: E402


@njit
def _flow_back(x, y, I):
    return _flow_y(x, y, -1.0, I[0], I[1], I[2], int(I[3]))


@njit
def _t_inv_y(x, y):
    return _t_inverse(x, y)[1]


@njit
def _anom_fwd_u(u1, u2, P, S, I):
    k = S[_KAP]
    X = (S[_QQ] - u2) / k
    Y = u1 / k
    if abs(X) < S[_XOUT] and abs(Y) < S[_YOUT]:
        Yn, st = _fibre(X, Y, S, I)
        return k * Yn, S[_QQ] - k * (0.5 * X), st
    a, b = _da_fwd_u(u1, u2, P)
    return a, b, _OK


@njit
def _anom_inv_u(u1, u2, P, S, I):
    k = S[_KAP]
    X = (S[_QQ] - u2) / k
    Y = u1 / k
    if abs(X) < 0.5 * S[_XOUT] and abs(Y) < S[_LAMU] * S[_YOUT]:
        Yp, st = _fibre_inverse(2.0 * X, Y, S, I)
        return k * Yp, S[_QQ] - k * (2.0 * X), st
    return _da_inv_u(u1, u2, P)


@njit
def _anomalous_forward(x, y, P, S, I):
    u1, u2 = _to_u(x, y, P)
    a, b, st = _anom_fwd_u(u1, u2, P, S, I)
    x, y = _from_u(a, b, P)
    return x, y, st


@njit
def _anomalous_inverse(x, y, P, S, I):
    u1, u2 = _to_u(x, y, P)
    a, b, st = _anom_inv_u(u1, u2, P, S, I)
    x, y = _from_u(a, b, P)
    return x, y, st


@njit
def _da_many(xs, ys, fwd, P, out_x, out_y, out_st):
    for k in range(xs.shape[0]):
        if fwd:
            a, b = _da_forward(xs[k], ys[k], P)
            st = _OK
        else:
            a, b, st = _da_inverse(xs[k], ys[k], P)
        out_x[k] = a
        out_y[k] = b
        out_st[k] = st


@njit
def _anomalous_many(xs, ys, fwd, P, S, I, out_x, out_y, out_st):
    for k in range(xs.shape[0]):
        if fwd:
            a, b, st = _anomalous_forward(xs[k], ys[k], P, S, I)
        else:
            a, b, st = _anomalous_inverse(xs[k], ys[k], P, S, I)
        out_x[k] = a
        out_y[k] = b
        out_st[k] = st


# ------------------------------------------------------------------ public

_DEFAULT = None


def default_config() -> DAConfig:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = DAConfig()
    return _DEFAULT


def _iparams(cfg: IntegratorConfig) -> np.ndarray:
    return np.array([cfg.abs_tol, cfg.rel_tol, cfg.max_step, float(cfg.max_steps)])


def _raise_status(st, what, p):
    if st == _BUDGET:
        raise DAError(f"integrator budget exhausted in {what} at {tuple(p)}")
    if st == _NO_CONVERGENCE:
        raise DAError(f"{what} did not converge at {tuple(p)}")


def da_step(p, direction: str = FORWARD, cfg: DAConfig | None = None,
            inverse_tol: float = 1e-12) -> TorusPoint:
    """One step of the standard DA map (no saddle insertion)."""
    cfg = cfg or default_config()
    P = cfg.params()
    x, y = float(p[0]) % 1.0, float(p[1]) % 1.0
    if direction == FORWARD:
        return TorusPoint(*_da_forward(x, y, P))
    if direction != INVERSE:
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}")
    a, b, st = _da_inverse(x, y, P)
    _raise_status(st, "DA inverse", p)
    res = torus_distance(_da_forward(a, b, P), (x, y))
    if res > inverse_tol:
        raise DAError(f"DA inverse residual {res:.3g} > {inverse_tol:g} at {tuple(p)}")
    return TorusPoint(a, b)


def anomalous_da_step(p, direction: str = FORWARD, cfg: DAConfig | None = None,
                      ins: SaddleInsertion | None = None, inverse_tol: float = 1e-10) -> TorusPoint:
    """One step of the DA with the plane saddle inserted at q.

    Inside R_q the fibre map is only known to integrator accuracy, so the
    inverse residual bound defaults to 1e-10 rather than the 1e-12 used for
    the standard DA.
    """
    cfg = cfg or default_config()
    ins = ins or SaddleInsertion()
    P, S, I = cfg.params(), ins.params(cfg), _iparams(ins.integrator)
    x, y = float(p[0]) % 1.0, float(p[1]) % 1.0
    if direction == FORWARD:
        a, b, st = _anomalous_forward(x, y, P, S, I)
        _raise_status(st, "anomalous DA", p)
        return TorusPoint(a, b)
    if direction != INVERSE:
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}")
    a, b, st = _anomalous_inverse(x, y, P, S, I)
    _raise_status(st, "anomalous DA inverse", p)
    fa, fb, _ = _anomalous_forward(a, b, P, S, I)
    res = torus_distance((fa, fb), (x, y))
    if res > inverse_tol:
        raise DAError(f"anomalous DA inverse residual {res:.3g} > {inverse_tol:g} at {tuple(p)}")
    return TorusPoint(a, b)


def map_many(points, direction: str = FORWARD, cfg: DAConfig | None = None,
             ins: SaddleInsertion | None = None) -> np.ndarray:
    """Vectorised DA (``ins=None``) or anomalous DA on an ``(n, 2)`` array."""
    cfg = cfg or default_config()
    pts = np.asarray(points, dtype=float).reshape(-1, 2) % 1.0
    xs, ys = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])
    ox, oy = np.empty_like(xs), np.empty_like(ys)
    st = np.zeros(xs.shape[0], dtype=np.int64)
    fwd = direction == FORWARD
    if ins is None:
        _da_many(xs, ys, fwd, cfg.params(), ox, oy, st)
    else:
        _anomalous_many(xs, ys, fwd, cfg.params(), ins.params(cfg), _iparams(ins.integrator), ox, oy, st)
    bad = np.flatnonzero(st)
    if bad.size:
        k = bad[0]
        _raise_status(int(st[k]), "vectorised map", pts[k])
    return np.column_stack([ox, oy])


def chart_radius_of(z, cfg: DAConfig | None = None) -> float:
    """Chart-coordinate radius of the torus point z (no range check)."""
    cfg = cfg or default_config()
    u1, u2 = _to_u(float(z[0]), float(z[1]), cfg.params())
    return math.hypot(u1, u2) / cfg.chart_scale


def chart_transport(x, direction: str = TO_TORUS, cfg: DAConfig | None = None):
    """The chart at p: plane point (chart coordinates) <-> torus point.

    The stable eigendirection of A pulls back to (0, 1). Points beyond
    ``cfg.chart_limit`` are rejected in both directions.
    """
    cfg = cfg or default_config()
    P = cfg.params()
    if direction == TO_TORUS:
        c1, c2 = float(x[0]), float(x[1])
        if math.hypot(c1, c2) > cfg.chart_limit:
            raise ValueError(f"{tuple(x)} is outside the chart (radius > {cfg.chart_limit})")
        return TorusPoint(*_from_u(c1 * cfg.chart_scale, c2 * cfg.chart_scale, P))
    if direction == TO_PLANE:
        u1, u2 = _to_u(float(x[0]), float(x[1]), P)
        c1, c2 = u1 / cfg.chart_scale, u2 / cfg.chart_scale
        if math.hypot(c1, c2) > cfg.chart_limit:
            raise ValueError(f"{tuple(x)} is not in the chart image")
        return c1, c2
    raise ValueError(f"direction must be {TO_TORUS!r} or {TO_PLANE!r}")


# ------------------------------------------------------------- diagnostics

def differential(fn, z, h: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of a torus map at z (torus-metric deltas)."""
    z = np.asarray([float(z[0]), float(z[1])])
    J = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        a = np.asarray(tuple(fn(z + e)))
        b = np.asarray(tuple(fn(z - e)))
        d = a - b
        d -= np.round(d)
        J[:, j] = d / (2 * h)
    return J


@dataclass(frozen=True)
class InjectivityReport:
    resolution: int
    min_image_distance: float
    threshold: float
    closest_pair: tuple[int, int]

    @property
    def ok(self) -> bool:
        return self.min_image_distance > self.threshold


def sampled_injectivity(images: np.ndarray, resolution: int, factor: float = 1e-4) -> InjectivityReport:
    """Minimum torus distance between images of distinct grid cells.

    ``images`` are the images of the cell centres of a ``resolution**2``
    grid; the threshold is ``factor`` times the cell diameter.
    """
    from scipy.spatial import cKDTree

    pts = np.mod(images, 1.0)
    pts[pts >= 1.0] = 0.0
    tree = cKDTree(pts, boxsize=1.0)
    d, idx = tree.query(pts, k=2)
    k = int(np.argmin(d[:, 1]))
    return InjectivityReport(resolution, float(d[k, 1]), factor * math.sqrt(2) / resolution,
                             (k, int(idx[k, 1])))


def grid_centres(resolution: int) -> np.ndarray:
    c = (np.arange(resolution) + 0.5) / resolution
    X, Y = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])
