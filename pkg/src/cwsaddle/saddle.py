"""The anomalous saddle f = phi_1 o T of the plane.

``f`` fixes the origin, acts on E as ``p -> p/2`` and pushes every point of
the wedge R1 = {0 <= y <= x <= 1} off E at unit speed rho. Orbits are
classified with a three-way :class:`Verdict`; ``Undecided`` is reported
honestly near E where the escape time blows up like 1/rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .eset import _in_e, _rho
from .flow import (BUDGET_EXHAUSTED, IntegrationBudgetError, IntegratorConfig,
                   _flow_y)
from .plmap import FORWARD, INVERSE, PLMap, _region, _t_forward, _t_inverse

CONVERGES = "converges"
ESCAPES = "escapes"
UNDECIDED = "undecided"

# integer tags used by the kernels
_CONV, _ESC, _UND = 0, 1, 2
# region kinds
_WEDGE, _BOX = 0, 1


@dataclass(frozen=True)
class Rectangle:
    """Axis-parallel closed box ``[x0, x1] x [y0, y1]``."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 <= self.x1 and self.y0 <= self.y1):
            raise ValueError(f"empty rectangle {self}")

    def contains(self, p) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1


@dataclass(frozen=True)
class Wedge:
    """R1 = {(x, y): 0 <= y <= x <= 1}, the default reference region."""

    def contains(self, p) -> bool:
        return 0.0 <= p[1] <= p[0] <= 1.0


R1 = Wedge()


def _region_code(region) -> tuple[int, float, float, float, float]:
    if region is None or isinstance(region, Wedge):
        return _WEDGE, 0.0, 1.0, 0.0, 1.0
    if isinstance(region, Rectangle):
        return _BOX, region.x0, region.x1, region.y0, region.y1
    raise TypeError(f"region must be a Wedge or Rectangle, got {type(region).__name__}")


@dataclass(frozen=True)
class Verdict:
    """Outcome of iterating f from a point.

    ``n`` is the escape iterate for ``escapes`` and the number of iterations
    run for ``undecided``; it is 0 for ``converges``. ``final_norm`` is the
    Euclidean norm of the last computed iterate, kept so norm convergence
    to the origin can be read off separately from region escape.
    """

    tag: str
    n: int = 0
    final_norm: float = math.nan

    @classmethod
    def converges(cls, final_norm=0.0):
        return cls(CONVERGES, 0, final_norm)

    @classmethod
    def escapes(cls, n, final_norm=math.nan):
        return cls(ESCAPES, int(n), final_norm)

    @classmethod
    def undecided(cls, iterations, final_norm=math.nan):
        return cls(UNDECIDED, int(iterations), final_norm)

    def __str__(self):
        if self.tag == CONVERGES:
            return "Converges"
        if self.tag == ESCAPES:
            return f"Escapes({self.n})"
        return f"Undecided({self.n})"


@njit
def _step(x, y, fwd, atol, rtol, max_step, max_steps):
    """One step of f (fwd) or f^-1. Returns (x, y, status)."""
    if fwd:
        tx, ty = _t_forward(x, y)
        yy, _, _, status = _flow_y(tx, ty, 1.0, atol, rtol, max_step, max_steps)
        return tx, yy, status
    yy, _, _, status = _flow_y(x, y, -1.0, atol, rtol, max_step, max_steps)
    ix, iy = _t_inverse(x, yy)
    return ix, iy, status


@njit
def _inside(x, y, kind, x0, x1, y0, y1):
    if kind == _WEDGE:
        return 0.0 <= y and y <= x and x <= 1.0
    return x0 <= x and x <= x1 and y0 <= y and y <= y1


@njit
def _verdict(x, y, max_iter, kind, x0, x1, y0, y1, atol, rtol, max_step, max_steps):
    """Returns (tag, n, x_last, y_last, status)."""
    if _in_e(x, y):
        return _CONV, 0, x, y, 0
    for n in range(1, max_iter + 1):
        x, y, status = _step(x, y, True, atol, rtol, max_step, max_steps)
        if status == BUDGET_EXHAUSTED:
            return _UND, n, x, y, status
        if not _inside(x, y, kind, x0, x1, y0, y1):
            return _ESC, n, x, y, 0
    return _UND, max_iter, x, y, 0


@njit
def _verdict_grid(xs, ys, max_iter, kind, x0, x1, y0, y1, atol, rtol, max_step,
                  max_steps, out_tag, out_n, out_norm):
    for k in range(xs.shape[0]):
        tag, n, xl, yl, _ = _verdict(xs[k], ys[k], max_iter, kind, x0, x1, y0, y1,
                                     atol, rtol, max_step, max_steps)
        out_tag[k] = tag
        out_n[k] = n
        out_norm[k] = math.hypot(xl, yl)


@njit
def _step_many(xs, ys, fwd, atol, rtol, max_step, max_steps, out_x, out_y, out_st):
    for k in range(xs.shape[0]):
        out_x[k], out_y[k], out_st[k] = _step(xs[k], ys[k], fwd, atol, rtol, max_step, max_steps)


_TAGS = {_CONV: CONVERGES, _ESC: ESCAPES, _UND: UNDECIDED}


@dataclass(frozen=True)
class SaddleMap:
    """Handle bundling T, the flow, and the integrator settings."""

    plmap: PLMap = field(default_factory=PLMap)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __call__(self, p, direction: str = FORWARD):
        return saddle_step(p, direction, self.integrator)

    def verdict(self, p, max_iter: int = 200, region=None) -> Verdict:
        return stable_verdict(p, max_iter, region, self.integrator)


def saddle_step(p, direction: str = FORWARD, cfg: IntegratorConfig | None = None):
    """``f(p)`` (forward) or ``f^{-1}(p)`` (inverse).

    >>> saddle_step((1.0, 0.5))
    (0.5, 0.25)
    """
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}, got {direction!r}")
    cfg = cfg or IntegratorConfig()
    x, y, status = _step(float(p[0]), float(p[1]), direction == FORWARD, *cfg.as_tuple())
    if status == BUDGET_EXHAUSTED:
        raise IntegrationBudgetError(f"step budget {cfg.max_steps} exhausted at {p}")
    return float(x), float(y)


def saddle_step_many(points, direction: str = FORWARD,
                     cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Vectorised :func:`saddle_step` on an ``(n, 2)`` array."""
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}, got {direction!r}")
    cfg = cfg or IntegratorConfig()
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    xs, ys = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])
    ox, oy = np.empty_like(xs), np.empty_like(ys)
    st = np.empty(xs.shape[0], dtype=np.int64)
    _step_many(xs, ys, direction == FORWARD, *cfg.as_tuple(), ox, oy, st)
    bad = np.flatnonzero(st == BUDGET_EXHAUSTED)
    if bad.size:
        raise IntegrationBudgetError(f"step budget {cfg.max_steps} exhausted at {tuple(pts[bad[0]])}")
    return np.column_stack([ox, oy])


def orbit(p, n: int, cfg: IntegratorConfig | None = None, direction: str = FORWARD) -> np.ndarray:
    """``(n+1, 2)`` array of the first ``n`` iterates, starting with ``p``."""
    out = np.empty((n + 1, 2))
    out[0] = p
    q = (float(p[0]), float(p[1]))
    for k in range(1, n + 1):
        q = saddle_step(q, direction, cfg)
        out[k] = q
    return out


def stable_verdict(p, max_iter: int = 200, region=None,
                   cfg: IntegratorConfig | None = None) -> Verdict:
    """Classify the forward orbit of ``p`` relative to ``region`` (default R1).

    Points of E converge; otherwise the first ``n <= max_iter`` with
    ``f^n(p)`` outside the region gives ``Escapes(n)``. An exhausted
    integrator budget yields ``Undecided`` rather than an exception.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    cfg = cfg or IntegratorConfig()
    tag, n, xl, yl, _ = _verdict(float(p[0]), float(p[1]), int(max_iter),
                                 *_region_code(region), *cfg.as_tuple())
    return Verdict(_TAGS[tag], int(n), float(math.hypot(xl, yl)))


@dataclass(frozen=True)
class VerdictGrid:
    points: np.ndarray
    tags: np.ndarray  # int8: 0 converges, 1 escapes, 2 undecided
    iterations: np.ndarray
    final_norm: np.ndarray
    rho: np.ndarray

    def counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.tags == code)) for code, name in _TAGS.items()}


def verdict_grid(resolution: int = 400, max_iter: int = 200, region=None,
                 cfg: IntegratorConfig | None = None, bounds=(0.0, 1.0, 0.0, 1.0)) -> VerdictGrid:
    """Verdicts on the ``(resolution+1)**2`` grid ``x0 + k (x1-x0)/resolution``."""
    cfg = cfg or IntegratorConfig()
    x0, x1, y0, y1 = bounds
    k = np.arange(resolution + 1)
    gx = x0 + (x1 - x0) * k / resolution
    gy = y0 + (y1 - y0) * k / resolution
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    xs, ys = np.ascontiguousarray(X.ravel()), np.ascontiguousarray(Y.ravel())
    tags = np.empty(xs.shape[0], dtype=np.int8)
    its = np.empty(xs.shape[0], dtype=np.int64)
    norms = np.empty(xs.shape[0])
    _verdict_grid(xs, ys, int(max_iter), *_region_code(region), *cfg.as_tuple(), tags, its, norms)
    rho = np.array([_rho(a, b)[0] for a, b in zip(xs, ys)])
    return VerdictGrid(np.column_stack([xs, ys]), tags, its, norms, rho)


@dataclass(frozen=True)
class LemmaResiduals:
    half_residual: float
    commute_residual: float | None  # None when the trajectory leaves R1
    note: str = ""


def lemma_residuals(p, t: float, cfg: IntegratorConfig | None = None) -> LemmaResiduals:
    """Residuals of rho(T p) = rho(p)/2 and phi_t(T p) = T(phi_t p) at ``p``.

    Raises ValueError when ``p`` is not in R1 or ``t < 0``. The commutation
    residual is ``None`` when phi_t(p) leaves R1, since the identity is only
    claimed inside the wedge.
    """
    x, y = float(p[0]), float(p[1])
    if not R1.contains((x, y)):
        raise ValueError(f"{p} is outside R1")
    t = float(t)
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError("t must be finite and >= 0")
    cfg = cfg or IntegratorConfig()
    tx, ty = _t_forward(x, y)
    half = abs(_rho(tx, ty)[0] - 0.5 * _rho(x, y)[0])
    fy, _, _, st = _flow_y(x, y, t, *cfg.as_tuple())
    if st == BUDGET_EXHAUSTED:
        raise IntegrationBudgetError(f"step budget exhausted at {p}")
    if not R1.contains((x, fy)):
        return LemmaResiduals(half, None, "phi_t(p) leaves R1; commutation not applicable")
    lhs, _, _, st = _flow_y(tx, ty, t, *cfg.as_tuple())
    if st == BUDGET_EXHAUSTED:
        raise IntegrationBudgetError(f"step budget exhausted at {p}")
    rx, ry = _t_forward(x, fy)
    return LemmaResiduals(half, math.hypot(tx - rx, lhs - ry))


def region_of(p) -> int:
    return int(_region(float(p[0]), float(p[1])))
