"""Numba switch.

Kernels are written once as scalar loops.  When numba is importable and
``ISOCLASS_DISABLE_NUMBA`` is unset (or "0"), they are compiled with
``@njit``; otherwise the numpy-vectorised twins in :mod:`isoclass.kernels`
are used instead.
"""

from __future__ import annotations

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

ENV_FLAG = "ISOCLASS_DISABLE_NUMBA"


def numba_enabled() -> bool:
    if not HAVE_NUMBA:
        return False
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("", "0", "false", "no")


def njit(fn):
    """Compile ``fn`` in nopython mode if numba exists, else return it unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
