"""Kernel backend selection.

The embedding trainer has two interchangeable inner-loop implementations:
a numba ``@njit`` kernel (default when numba imports) and a pure-numpy
fallback.  Set ``EMERGEKG_DISABLE_NUMBA=1`` to force the numpy path, e.g.
on platforms without a working numba install or to cross-check results.
Both paths consume identical RNG streams, so they train on the same
(center, context, negatives) sequences.
"""

from __future__ import annotations

import os

_ENV_FLAG = "EMERGEKG_DISABLE_NUMBA"

try:
    import numba  # noqa: F401

    _NUMBA_IMPORTED = True
except ImportError:  # pragma: no cover - exercised only without numba
    _NUMBA_IMPORTED = False


def numba_available() -> bool:
    return _NUMBA_IMPORTED


def numba_enabled() -> bool:
    """True when the njit kernels should be used (env flag wins)."""
    if os.environ.get(_ENV_FLAG, "").strip() not in ("", "0"):
        return False
    return _NUMBA_IMPORTED


def active_backend() -> str:
    return "numba" if numba_enabled() else "numpy"
