"""JIT dispatch for the hot kernels.

The numeric kernels in :mod:`cbfteleop.kernels` are compiled with numba's
``@njit`` by default. Setting ``CBFTELEOP_NO_NUMBA=1`` (or running on an
interpreter without numba) selects the pure-NumPy fallback: the same source,
executed uncompiled. ``benchmarks/bench_filter.py`` compares the two paths.
"""

import os


def _jit_enabled() -> bool:
    flag = os.environ.get("CBFTELEOP_NO_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


USING_NUMBA = False

if _jit_enabled():
    try:
        from numba import njit as _numba_njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


if USING_NUMBA:

    def njit(func):
        return _numba_njit(cache=True)(func)

else:

    def njit(func):
        return func
