"""numba shim.

Set ``RADIAL_UNIQUENESS_NO_NUMBA=1`` to run every kernel as plain Python over
numpy arrays. The results are identical; the fallback only exists for
debugging and for benchmarking the compiled path against it.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("RADIAL_UNIQUENESS_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    GOT_NUMBA = True
except ImportError:
    _numba_njit = None
    GOT_NUMBA = False


def njit(*args, **kwargs):
    if GOT_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def _identity(fn):
        return fn

    return _identity
