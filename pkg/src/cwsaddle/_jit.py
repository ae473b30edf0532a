"""Numba switch for the hot kernels.

Set ``CWSADDLE_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. The kernels are written in the subset of Python that numba
compiles, so both paths execute the same source.
"""
from __future__ import annotations

import os

USE_NUMBA = os.environ.get("CWSADDLE_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")

try:  # pragma: no cover - depends on environment
    if not USE_NUMBA:
        raise ImportError
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    _njit = None
    NUMBA_AVAILABLE = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if NUMBA_AVAILABLE:
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap
