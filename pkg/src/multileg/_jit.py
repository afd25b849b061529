"""Optional numba acceleration.

Hot kernels are written once, in a numba-compatible subset of Python and
numpy.  When numba is importable and ``MULTILEG_DISABLE_NUMBA`` is unset
(or falsy) they are compiled with ``njit``; otherwise the very same
functions run as plain numpy code.
"""

import os

DISABLE_ENV = "MULTILEG_DISABLE_NUMBA"


def _flag_set(value):
    return value.strip().lower() in ("1", "true", "yes", "on")


def _numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _numba_available() and not _flag_set(os.environ.get(DISABLE_ENV, ""))


def jit(fn):
    """Compile ``fn`` with numba when enabled, else return it untouched."""
    if not USE_NUMBA:
        return fn
    import numba

    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
