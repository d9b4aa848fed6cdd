"""Optional numba acceleration.

Set ``CUSPFORGE_NUMBA=0`` to force the pure-numpy kernels. When numba is
missing the numpy kernels are used regardless of the flag.
"""

import os

_flag = os.environ.get("CUSPFORGE_NUMBA", "1").strip().lower()
_requested = _flag not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _requested


def njit(func):
    """Compile ``func`` in nopython mode if numba is usable, else return it."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
