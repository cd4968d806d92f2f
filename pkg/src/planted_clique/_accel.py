"""Numba switch.

Set ``PLANTED_CLIQUE_NUMBA=0`` to force the pure-numpy kernels even when
numba is importable. The flag is read once at import time.
"""
import os


def _noop_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def decorator(f):
        return f

    return decorator


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("PLANTED_CLIQUE_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)

if HAVE_NUMBA:
    njit = numba.njit
else:  # pragma: no cover
    njit = _noop_jit

BACKEND = "numba" if USE_NUMBA else "numpy"
