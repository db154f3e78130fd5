"""Backend selection for the hot kernels.

Every kernel exists twice: a loop version compiled with numba, and a
vectorised numpy version.  The numba path is used when numba imports and
``IWTSTEGO_DISABLE_NUMBA`` is unset (or ``0``).  Both paths must return
identical results; the test-suite checks this.
"""

from __future__ import annotations

import os

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    NUMBA_AVAILABLE = False


def _env_disabled() -> bool:
    return os.environ.get("IWTSTEGO_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = NUMBA_AVAILABLE and not _env_disabled()


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, else identity.

    The undecorated function still runs (slowly) in plain Python, which
    keeps the loop kernels testable without numba.
    """
    if NUMBA_AVAILABLE:
        return numba.njit(cache=True)(func)
    return func


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"

