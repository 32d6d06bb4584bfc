"""Kernel backend selection.

Hot loops in :mod:`lorentz_capillary.kernels` exist twice: a numba-compiled
loop version and a vectorised numpy version.  The environment variable
``LORENTZ_CAPILLARY_BACKEND`` picks one (``numba`` or ``numpy``).  When it is
unset, numba is used if it imports.
"""
import os

ENV_VAR = "LORENTZ_CAPILLARY_BACKEND"

try:
    from numba import njit as _njit

    HAS_NUMBA = True
except Exception:  # pragma: no cover
    HAS_NUMBA = False

    def _njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(func):
            return func

        return wrapper


def requested_backend():
    value = os.environ.get(ENV_VAR, "").strip().lower()
    if value in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if value not in ("numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {value!r}")
    if value == "numba" and not HAS_NUMBA:
        return "numpy"
    return value


njit = _njit
