"""Optional numba acceleration.

Set ``BS_TRIANGLE_DISABLE_NUMBA=1`` to run every kernel as plain Python over
numpy arrays.  The kernels are written so both paths give identical tables.
"""

import os

_DISABLED = os.environ.get("BS_TRIANGLE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False
    _njit = None


def njit(*args, **kwargs):
    """``numba.njit`` when available and enabled, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def decorator(func):
        return func

    return decorator


def backend() -> str:
    return "numba" if HAVE_NUMBA else "python"
