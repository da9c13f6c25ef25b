"""numba switch.

Kernels are written once over numpy arrays.  When numba is importable and
``ARROWLAB_NO_JIT`` is not set to 1 they are compiled with ``@njit``;
otherwise the same functions run as plain Python.
"""
import os

JIT_ENV = "ARROWLAB_NO_JIT"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_JIT = numba is not None and os.environ.get(JIT_ENV, "") != "1"


def njit(fn):
    if USE_JIT:
        return numba.njit(cache=True)(fn)
    return fn
