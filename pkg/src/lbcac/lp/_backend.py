"""Pick the pivot kernel: compiled when available, numpy otherwise.

Set ``LBCAC_PURE_PYTHON=1`` to force the numpy kernel.
"""

import os

from ._pivot_py import run_pivots as python_kernel

try:
    if os.environ.get("LBCAC_PURE_PYTHON"):
        raise ImportError("pure-python kernel forced by environment")
    from ._pivot import run_pivots as compiled_kernel
except ImportError:
    compiled_kernel = None

BACKEND = "cython" if compiled_kernel is not None else "python"
KERNELS = {"python": python_kernel}
if compiled_kernel is not None:
    KERNELS["cython"] = compiled_kernel


def get_kernel(name=None):
    if name is None:
        name = BACKEND
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"pivot backend {name!r} unavailable; have {sorted(KERNELS)}") from None
