"""Backend dispatch for the hot pixel kernels.

Two interchangeable implementations exist: numba @njit loops
(``numba_impl``) and vectorized NumPy (``numpy_impl``). The active one is
picked once at import time from the ``WILTSCAN_KERNELS`` environment
variable: ``numba`` (default) or ``numpy``. When numba is requested but
not importable the NumPy path is used instead.

Both backends are bit-identical by construction; ``benchmarks/bench_kernels.py``
times them against each other and re-checks equality.
"""

import os
import warnings

_requested = os.environ.get("WILTSCAN_KERNELS", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(
        f"WILTSCAN_KERNELS must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numba":
    try:
        from wiltscan.kernels import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:  # numba missing or broken; degrade quietly but visibly
        from wiltscan.kernels import numpy_impl as _impl
        BACKEND = "numpy"
        warnings.warn("numba unavailable, falling back to NumPy kernels")
else:
    from wiltscan.kernels import numpy_impl as _impl
    BACKEND = "numpy"

rgb_to_hsv_u8 = _impl.rgb_to_hsv_u8
hsv_to_rgb_u8 = _impl.hsv_to_rgb_u8
erode = _impl.erode
dilate = _impl.dilate
assign_labels = _impl.assign_labels
label_components = _impl.label_components
trace_boundary = _impl.trace_boundary

__all__ = [
    "BACKEND",
    "rgb_to_hsv_u8",
    "hsv_to_rgb_u8",
    "erode",
    "dilate",
    "assign_labels",
    "label_components",
    "trace_boundary",
]
