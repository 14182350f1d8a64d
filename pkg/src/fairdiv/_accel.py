"""Numba shim: hot kernels compile with @njit unless disabled.

Set FAIRDIV_DISABLE_NUMBA=1 to force the pure-Python/numpy fallback path.
Both paths run the same code; the fallback is simply uncompiled (slow but
algorithmically identical). See benchmarks/bench_kernels.py for a timing
comparison of the two.
"""

import os


def _identity_decorator(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def deco(func):
        return func

    return deco


_disabled = os.environ.get("FAIRDIV_DISABLE_NUMBA", "") not in ("", "0")

if _disabled:
    njit = _identity_decorator
    USING_NUMBA = False
else:
    try:
        from numba import njit  # noqa: F401

        USING_NUMBA = True
    except ImportError:
        njit = _identity_decorator
        USING_NUMBA = False
