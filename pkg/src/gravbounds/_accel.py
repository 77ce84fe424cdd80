"""Numba toggle.

Set ``GRAVBOUNDS_NO_NUMBA=1`` to run every hot kernel through its pure-numpy
fallback. When numba is missing the fallback is used automatically.
"""

import os

# omp is thread-safe for concurrent sweep workers; the TBB probe only warns here
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

_DISABLED = os.environ.get("GRAVBOUNDS_NO_NUMBA", "0").strip().lower() in ("1", "true", "yes")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and not _DISABLED

NUMBA_OPTS = {"cache": True, "fastmath": False, "error_model": "numpy"}


def njit(func=None, **kwargs):
    """``numba.njit`` with project defaults, or the identity when numba is off."""
    opts = dict(NUMBA_OPTS)
    opts.update(kwargs)

    def wrap(f):
        if not NUMBA_AVAILABLE:
            return f
        return _numba.njit(**opts)(f)

    if func is None:
        return wrap
    return wrap(func)


if NUMBA_AVAILABLE:
    prange = _numba.prange
else:  # pragma: no cover
    prange = range
