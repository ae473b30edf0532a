"""The continuum E and its exact distance field.

E is the base segment [0, 1] x {0} together with the vertical segments
{a} x [0, a] at every abscissa ``a = 2**-n + 2**-(n+i-1)`` (n, i >= 1).
The abscissae of generation ``n`` fill ``(2**-n, 2**-(n-1)]`` and accumulate
only at ``2**-n``, which is itself the first abscissa of generation ``n+1``,
so E is closed.

All abscissae are dyadic, hence exactly representable: a float ``x`` is an
abscissa iff ``0 < x <= 1`` and its significand has at most two set bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._jit import njit

#: significand bits of a double; index i > MAX_INDEX collapses onto 2**-n
MAX_INDEX = 53
_MAX_EXPONENT = 1022


def segment_abscissa(n: int, i: int) -> float:
    """Abscissa of the ``i``-th segment of generation ``n``.

    >>> segment_abscissa(3, 2)
    0.1875
    """
    n, i = int(n), int(i)
    if n < 1 or i < 1:
        raise ValueError(f"generation and index must be >= 1, got ({n}, {i})")
    if i > MAX_INDEX or n + i - 1 > _MAX_EXPONENT:
        raise ValueError(
            f"abscissa({n}, {i}) is not distinguishable from its accumulation value 2**-{n}"
        )
    return math.ldexp(1.0, -n) + math.ldexp(1.0, -(n + i - 1))


@njit
def _is_abscissa(x):
    if not (x > 0.0 and x <= 1.0):
        return False
    m, _ = math.frexp(x)
    k = m * 9007199254740992.0  # 2**53, exact integer-valued
    bits = 0
    while k > 0.0:
        h = math.floor(k * 0.5)
        if k - 2.0 * h != 0.0:
            bits += 1
            if bits > 2:
                return False
        k = h
    return True


@njit
def _in_e(x, y):
    if y == 0.0 and x >= 0.0 and x <= 1.0:
        return True
    return y >= 0.0 and y <= x and _is_abscissa(x)


@njit
def _generation_of(v):
    # the n >= 1 with 2**-n < v <= 2**-(n-1), for 0 < v <= 1
    m, e = math.frexp(v)
    n = 1 - e if m > 0.5 else 2 - e
    return max(1, n)


@njit
def _abscissa_below(v):
    """Largest abscissa <= v, for 2**-1000 <= v <= 1."""
    n = _generation_of(v)
    g_lo = math.ldexp(1.0, -n)
    span = v - g_lo  # exact (Sterbenz)
    m, e = math.frexp(span)
    i = max(1, 2 - n - e)
    if i > MAX_INDEX:
        return g_lo
    a = g_lo + math.ldexp(1.0, -(n + i - 1))
    while a > v and i < MAX_INDEX:
        i += 1
        a = g_lo + math.ldexp(1.0, -(n + i - 1))
    if a > v:
        return g_lo
    return a


@njit
def _abscissa_above(v):
    """Smallest abscissa >= v, for 2**-1000 <= v <= 1."""
    n = _generation_of(v)
    g_lo = math.ldexp(1.0, -n)
    span = v - g_lo
    m, e = math.frexp(span)
    i = max(1, 2 - n - e)
    # a_i is the largest abscissa of this generation that is <= v
    if i > MAX_INDEX + 1:
        i = MAX_INDEX + 1
    while i > 1:
        a = g_lo + math.ldexp(1.0, -(n + i - 1))
        if i <= MAX_INDEX and a >= v:
            return a
        i -= 1
    return 2.0 * g_lo


_TINY = 2.0 ** -1000


@njit
def _seg_dist(x, y, a):
    if y > a:
        return math.hypot(x - a, y - a), a
    return abs(x - a), y


@njit
def _rho(x, y):
    """Distance from (x, y) to E, with a witness point of E.

    For y >= 0 the squared distance to the segment at abscissa ``a`` is
    ``(x - a)**2 + max(0, y - a)**2``, convex in ``a``; its continuous
    minimiser is ``x`` when ``x >= y`` and ``(x + y) / 2`` otherwise. Over
    the (sorted, closed) abscissa set the minimum is therefore attained at
    one of the two abscissae bracketing that minimiser.
    """
    bx = min(max(x, 0.0), 1.0)
    best = math.hypot(x - bx, y)
    wx = bx
    wy = 0.0
    if best == 0.0 or y <= 0.0:
        # below the base every segment's nearest point is its foot, on the base
        return best, wx, wy
    v = x if x >= y else 0.5 * (x + y)
    if v >= 1.0:
        d, cy = _seg_dist(x, y, 1.0)
        if d < best:
            best, wx, wy = d, 1.0, cy
        return best, wx, wy
    if v < _TINY:
        # segments this close to the origin are within 2**-999 of the base
        a = _abscissa_above(_TINY)
        d, cy = _seg_dist(x, y, a)
        if d < best:
            best, wx, wy = d, a, cy
        return best, wx, wy
    a = _abscissa_below(v)
    d, cy = _seg_dist(x, y, a)
    if d < best:
        best, wx, wy = d, a, cy
    a = _abscissa_above(v)
    d, cy = _seg_dist(x, y, a)
    if d < best:
        best, wx, wy = d, a, cy
    return best, wx, wy


@njit
def _rho_many(xs, ys, out_d, out_wx, out_wy):
    for k in range(xs.shape[0]):
        d, wx, wy = _rho(xs[k], ys[k])
        out_d[k] = d
        out_wx[k] = wx
        out_wy[k] = wy


@njit
def _in_e_many(xs, ys, out):
    for k in range(xs.shape[0]):
        out[k] = _in_e(xs[k], ys[k])


def e_membership(p) -> bool:
    """True iff ``p`` lies exactly on E (base or some segment)."""
    x, y = float(p[0]), float(p[1])
    return bool(_in_e(x, y))


def rho(p) -> tuple[float, tuple[float, float]]:
    """Exact distance from ``p`` to E and a point of E attaining it."""
    d, wx, wy = _rho(float(p[0]), float(p[1]))
    return float(d), (float(wx), float(wy))


def rho_many(points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`rho`; returns ``(distances, witnesses)``."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    n = pts.shape[0]
    d = np.empty(n)
    wx = np.empty(n)
    wy = np.empty(n)
    _rho_many(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), d, wx, wy)
    return d, np.column_stack([wx, wy])


def e_membership_many(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    out = np.empty(pts.shape[0], dtype=np.bool_)
    _in_e_many(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), out)
    return out


@dataclass(frozen=True)
class ESet:
    """Closed-form description of E, truncated only when enumerated.

    ``generation_cutoff`` and ``index_cutoff`` bound :meth:`segments`; they
    never affect :func:`rho` or :func:`e_membership`, which are exact.
    """

    generation_cutoff: int = 64
    index_cutoff: int = 64

    base: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (1.0, 0.0))

    def segments(self, generations: int | None = None, indices: int | None = None) -> Iterator[tuple[int, int, float]]:
        """Yield ``(n, i, a)`` for the segment {a} x [0, a]."""
        gens = self.generation_cutoff if generations is None else generations
        idx = min(self.index_cutoff if indices is None else indices, MAX_INDEX)
        for n in range(1, gens + 1):
            for i in range(1, idx + 1):
                yield n, i, segment_abscissa(n, i)

    def contains(self, p) -> bool:
        return e_membership(p)

    def distance(self, p) -> float:
        return rho(p)[0]


def brute_force_rho(p, generations: int = 20, indices: int = MAX_INDEX) -> tuple[float, tuple[float, float]]:
    """Reference distance by scanning every segment up to the given depth.

    Independent of the pruned search in :func:`rho`: no windowing, no
    generation bracketing, just a minimum over the explicit segment list.
    """
    x, y = float(p[0]), float(p[1])
    a = np.array([segment_abscissa(n, i) for n in range(1, generations + 1)
                  for i in range(1, indices + 1)])
    # closest point on each vertical segment {a} x [0, a]
    cy = np.clip(y, 0.0, a)
    d = np.hypot(x - a, y - cy)
    k = int(np.argmin(d))
    bx = min(max(x, 0.0), 1.0)
    db = math.hypot(x - bx, y)
    if db <= d[k]:
        return db, (bx, 0.0)
    return float(d[k]), (float(a[k]), float(cy[k]))
