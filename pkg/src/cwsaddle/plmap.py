"""The piecewise-linear map T and its exact inverse.

Three linear pieces, each leaving its own closed region invariant::

    LOWER_WEDGE  x >= y >= 0      T1 = [[1/2, 0], [0, 1/2]]
    OUTER        x <= 0 or y <= 0 T2 = [[1/2, 0], [0, 2]]
    UPPER_WEDGE  y >= x >= 0      T3 = [[1/2, 0], [-3/2, 2]]

Every piece halves x, so T maps vertical lines to vertical lines.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit

FORWARD = "forward"
INVERSE = "inverse"


class Region(enum.IntEnum):
    LOWER_WEDGE = 1
    OUTER = 2
    UPPER_WEDGE = 3


M1 = np.array([[0.5, 0.0], [0.0, 0.5]])
M2 = np.array([[0.5, 0.0], [0.0, 2.0]])
M3 = np.array([[0.5, 0.0], [-1.5, 2.0]])


class PLMapError(RuntimeError):
    """Raised when a hard-coded piece disagrees with its defining conditions."""


def derive_m3() -> np.ndarray:
    """Solve T3(1, 1) = (1/2, 1/2), T3(0, 1) = (0, 2) for the matrix of T3."""
    src = np.array([[1.0, 0.0], [1.0, 1.0]])  # columns (1, 1) and (0, 1)
    dst = np.array([[0.5, 0.0], [0.5, 2.0]])
    return np.linalg.solve(src.T, dst.T).T


def check_m3(m3=M3) -> None:
    derived = derive_m3()
    if not np.array_equal(np.asarray(m3, dtype=float), derived):
        raise PLMapError(f"T3 matrix {np.asarray(m3).tolist()} != derived {derived.tolist()}")


@dataclass(frozen=True)
class PLMap:
    m1: np.ndarray = field(default_factory=lambda: M1.copy())
    m2: np.ndarray = field(default_factory=lambda: M2.copy())
    m3: np.ndarray = field(default_factory=lambda: M3.copy())

    def __post_init__(self):
        check_m3(self.m3)

    @property
    def inverses(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.linalg.inv(m) for m in (self.m1, self.m2, self.m3))

    def classify(self, p) -> Region:
        return classify_region(p)

    def __call__(self, p, direction: str = FORWARD):
        return apply_pl(p, direction)


check_m3()


@njit
def _region(x, y):
    if x >= y and y >= 0.0:
        return 1
    if x <= 0.0 or y <= 0.0:
        return 2
    return 3


@njit
def _t_forward(x, y):
    r = _region(x, y)
    if r == 1:
        return 0.5 * x, 0.5 * y
    if r == 2:
        return 0.5 * x, 2.0 * y
    return 0.5 * x, -1.5 * x + 2.0 * y


@njit
def _t_inverse(x, y):
    # each region is invariant under its own piece, so the image's region
    # selects the inverse
    r = _region(x, y)
    if r == 1:
        return 2.0 * x, 2.0 * y
    if r == 2:
        return 2.0 * x, 0.5 * y
    # T3^{-1} = [[2, 0], [3/2, 1/2]]
    return 2.0 * x, 1.5 * x + 0.5 * y


def classify_region(p) -> Region:
    """Region tag of ``p``; boundary ties go LOWER_WEDGE > OUTER > UPPER_WEDGE."""
    return Region(_region(float(p[0]), float(p[1])))


def apply_pl(p, direction: str = FORWARD) -> tuple[float, float]:
    x, y = float(p[0]), float(p[1])
    if direction == FORWARD:
        return _t_forward(x, y)
    if direction == INVERSE:
        return _t_inverse(x, y)
    raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}, got {direction!r}")
