"""numba switch for the dense kernels.

Set ``LPFORM_DISABLE_NUMBA=1`` to force the pure-numpy path, e.g. when
debugging or on platforms without an llvmlite wheel.
"""
import os

_DISABLED = os.environ.get("LPFORM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled by LPFORM_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap
