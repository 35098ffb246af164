"""Kernel selection: compiled ``_kernels`` when importable, else pure Python.

Set ``STEINLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

INT64_SAFE = 2 ** 62

if os.environ.get("STEINLAB_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def fits_int64(d, sum_bounds, coeff_bounds):
    """Conservative check that no intermediate of the compiled kernel overflows."""
    worst = max(sum_bounds) * max(coeff_bounds) * d + max(sum_bounds) * (d + 1)
    return worst < INT64_SAFE


def enumerate_prefix(d, sum_bounds, coeff_bounds, prefix, backend=None):
    backend = backend or BACKEND
    if backend == "cython" and _compiled is not None and fits_int64(d, sum_bounds, coeff_bounds):
        return _compiled.enumerate_prefix(d, list(sum_bounds), list(coeff_bounds), tuple(prefix))
    return _kernels_py.enumerate_prefix(d, sum_bounds, coeff_bounds, tuple(prefix))
