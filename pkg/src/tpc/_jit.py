"""Numba switch.

Set ``TPC_DISABLE_NUMBA=1`` to route every hot kernel through its pure-numpy
implementation. When numba is not importable the numpy path is used as well and
the ``@njit`` functions degrade to plain Python.
"""

import os

ENV_FLAG = "TPC_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def numba_disabled_by_env(environ=None):
    value = (environ if environ is not None else os.environ).get(ENV_FLAG, "")
    return value.strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not numba_disabled_by_env()


def opts():
    return dict(cache=True, nogil=True, fastmath=False, error_model="numpy")


def njit(func):
    if not HAVE_NUMBA:
        return func
    return numba.njit(**opts())(func)
