"""Numba/numpy backend selection.

Set ``MEMRISTOR1D_DISABLE_NUMBA=1`` to run every kernel on the pure-numpy path.
The flag is read once at import time.
"""
import os

_TRUTHY = {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

NUMBA_REQUESTED = os.environ.get("MEMRISTOR1D_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY
USE_NUMBA = NUMBA_REQUESTED and numba is not None


def njit(fn):
    """Compile with ``numba.njit`` when available, else return ``fn`` unchanged."""
    if numba is None:
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
