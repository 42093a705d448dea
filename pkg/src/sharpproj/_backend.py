"""Kernel backend selection.

The numeric kernels in :mod:`sharpproj.kernels` are written in plain
numpy-compatible Python and compiled with numba when available.  Set

    SHARPPROJ_BACKEND=numpy

to force the uncompiled fallback (useful for debugging and for the
benchmark in ``benchmarks/compare_backends.py``).  Any other value, or
an absent variable, selects numba when it is importable.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SHARPPROJ_BACKEND", "auto").strip().lower()

if _requested in ("numpy", "python", "nonumba", "off"):
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def maybe_jit(func):
    """Compile ``func`` with numba when the numba backend is active.

    Returns ``func`` unchanged on the numpy backend, so both paths run
    the same source.
    """
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(func)
    return func


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
