"""Optional numba compilation for the plain-float kernels.

The hot kernels are scalar functions that compile unchanged under numba's
nopython mode. When numba is unavailable, or when the environment variable
SAFE_ACCEL_NO_JIT is set (handy for debugging and for behavioural parity
tests), the pure-Python functions run as-is.
"""

from __future__ import annotations

import os

try:
    if os.environ.get("SAFE_ACCEL_NO_JIT"):
        raise ImportError("jit disabled by SAFE_ACCEL_NO_JIT")
    from numba import njit as _njit

    def maybe_jit(fn):
        return _njit(cache=True)(fn)

    JIT_ENABLED = True
except ImportError:

    def maybe_jit(fn):
        return fn

    JIT_ENABLED = False
