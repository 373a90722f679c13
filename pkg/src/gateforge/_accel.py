"""Optional numba acceleration for the numeric kernels.

Kernels are written once, in numpy code that numba can compile in nopython
mode.  When numba is importable and ``GATEFORGE_DISABLE_NUMBA`` is unset,
:func:`kernel` compiles them; otherwise it returns the function untouched and
the same source runs as plain numpy.
"""
import os

_FLAG = "GATEFORGE_DISABLE_NUMBA"


def _disabled_by_env():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _disabled_by_env():
        raise ImportError(f"{_FLAG} is set")
    from numba import njit as _njit

    USING_NUMBA = True
except ImportError:
    _njit = None
    USING_NUMBA = False

BACKEND = "numba" if USING_NUMBA else "numpy"


def kernel(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if USING_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn


def python_impl(fn):
    """Return the uncompiled Python function behind a kernel."""
    return getattr(fn, "py_func", fn)
