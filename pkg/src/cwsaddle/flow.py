"""Flow of the vertical field X(p) = (0, rho(p)).

The field is vertical, so x is carried through untouched and the flow is the
scalar problem ``y' = rho(x, y)``. It is integrated with the Dormand-Prince
5(4) embedded pair; rho is 1-Lipschitz, so nothing stiff happens.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._jit import njit
from .eset import _rho

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

OK = 0
BUDGET_EXHAUSTED = 1


class IntegrationBudgetError(RuntimeError):
    """The step budget ran out before reaching the requested time."""


@dataclass(frozen=True)
class IntegratorConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = 0.05
    max_steps: int = 1_000_000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "max_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    def as_tuple(self):
        return self.abs_tol, self.rel_tol, self.max_step, self.max_steps


@dataclass(frozen=True)
class FlowEvaluation:
    endpoint: tuple[float, float]
    steps_taken: int
    error_estimate: float


@njit
def _feature(x, y):
    """Which piece of E is nearest: (kind, abscissa); kind 0 base, 1 side, 2 top."""
    _, wx, wy = _rho(x, y)
    if wy == 0.0 and y != 0.0:
        return 0, wx
    if y > wy:
        return 2, wx
    return 1, wx


@njit
def _feature_slope(x, y, kind, a):
    """d/dy of the distance from (x, y) to the given piece of E."""
    if kind == 1:
        return 0.0
    wy = 0.0 if kind == 0 else a
    d = math.hypot(x - a, y - wy)
    if d == 0.0:
        return 0.0
    return (y - wy) / d


@njit
def _switch_point(x, y0, y1, kind0, a0):
    """Bisect for the y between y0 and y1 where the nearest piece stops being (kind0, a0)."""
    lo = y0
    hi = y1
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        k, a = _feature(x, mid)
        if k == kind0 and a == a0:
            lo = mid
        else:
            hi = mid
    return hi


@njit
def _flow_y(x, y, t, atol, rtol, max_step, max_steps):
    """Integrate y' = rho(x, y) from 0 to t (t may be negative).

    Returns ``(y_end, accepted_steps, accumulated_error, status)``. The
    error scale includes |x| so the controller behaves the same on a point
    and on its dyadic rescalings. rho is only piecewise smooth along a
    vertical line (the nearest piece of E changes); a step that would jump
    over such a switch is shortened to end on it, so no step straddles a
    kink by more than a rounding-level margin.
    """
    r0, _, _ = _rho(x, y)
    if r0 == 0.0 or t == 0.0:
        return y, 0, 0.0, OK
    sgn = 1.0 if t > 0.0 else -1.0
    total = abs(t)
    tau = 0.0
    h = min(max_step, total)
    k1 = sgn * r0
    steps = 0
    attempts = 0
    err_sum = 0.0
    ax = abs(x)
    kind0, a0 = _feature(x, y)
    while tau < total:
        if attempts >= max_steps:
            return y, steps, err_sum, BUDGET_EXHAUSTED
        attempts += 1
        if tau + h > total:
            h = total - tau
        k2 = sgn * _rho(x, y + h * _A21 * k1)[0]
        k3 = sgn * _rho(x, y + h * (_A31 * k1 + _A32 * k2))[0]
        k4 = sgn * _rho(x, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))[0]
        k5 = sgn * _rho(x, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))[0]
        k6 = sgn * _rho(x, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))[0]
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = sgn * _rho(x, y_new)[0]
        err = abs(h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7))
        scale = atol + rtol * max(abs(y), abs(y_new), ax)
        ratio = err / scale
        if ratio <= 1.0:
            kind1, a1 = _feature(x, y_new)
            if kind1 != kind0 or a1 != a0:
                ys = _switch_point(x, y, y_new, kind0, a0)
                margin = 1e-12 * max(abs(y), ax) + 1e-300
                # slope jump of rho at the switch; straddling it costs about
                # |jump| * |rho| * dt**2 / 2 of local error
                jump = abs(_feature_slope(x, ys, kind0, a0) - _feature_slope(x, ys, kind1, a1))
                dt_after = abs(y_new - ys) / max(abs(k7), 1e-300)
                kink_err = 0.5 * jump * abs(k7) * dt_after * dt_after
                if (kink_err > 0.1 * scale and abs(ys - y) > margin
                        and abs(y_new - ys) > margin):
                    # land on the switch: rho is nearly constant over the step
                    h = h * (ys - y) / (y_new - y)
                    continue
                if abs(ys - y) <= margin:
                    kind0, a0 = kind1, a1
            tau += h
            y = y_new
            k1 = k7
            steps += 1
            err_sum += err
            if k7 == 0.0:
                # landed exactly on the fixed set
                return y, steps, err_sum, OK
            kind0, a0 = _feature(x, y)
        if ratio == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * ratio ** -0.2))
        h = min(max_step, h * fac)
    return y, steps, err_sum, OK


def flow(p, t: float, cfg: IntegratorConfig | None = None) -> FlowEvaluation:
    """Time-``t`` map of the vertical field applied to ``p``."""
    cfg = cfg or IntegratorConfig()
    x, y = float(p[0]), float(p[1])
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    y_end, steps, err, status = _flow_y(x, y, t, *cfg.as_tuple())
    if status == BUDGET_EXHAUSTED:
        raise IntegrationBudgetError(
            f"step budget {cfg.max_steps} exhausted flowing {p} for t={t}")
    return FlowEvaluation((x, float(y_end)), int(steps), float(err))


def closed_form_oracle(p, t: float):
    """Analytic flow where rho has a closed form along the whole trajectory.

    * below the base with 0 <= x <= 1: the nearest point of E is (x, 0), so
      y(t) = y0 * exp(-t) (the trajectory never reaches the base);
    * on the line x = 1 with y >= 1: the nearest point is (1, 1) and the
      trajectory never leaves that line segment, y(t) = 1 + (y0 - 1) e^t.

    Returns ``None`` where neither applies.
    """
    x, y = float(p[0]), float(p[1])
    t = float(t)
    if 0.0 <= x <= 1.0 and y < 0.0:
        return (x, y * math.exp(-t))
    if x == 1.0 and y >= 1.0:
        return (x, 1.0 + (y - 1.0) * math.exp(t))
    return None
