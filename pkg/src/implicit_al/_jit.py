"""Optional numba acceleration.

Set ``IMPLICIT_AL_DISABLE_NUMBA=1`` to force the pure-numpy code paths, e.g.
for debugging or to compare both paths with ``benchmarks/bench_kernels.py``.
"""

import os
from typing import Any, Callable

DISABLED = os.environ.get("IMPLICIT_AL_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    from numba import njit as _numba_njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba_njit = None

HAVE_NUMBA = _numba_njit is not None and not DISABLED


def njit(*args: Any, **kwargs: Any) -> Callable:
    """``numba.njit`` when acceleration is enabled, identity decorator otherwise."""
    if HAVE_NUMBA:
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
