"""Kernel backend selection.

The compiled extension is preferred; set ``CGQ_PURE_PYTHON=1`` to force the
numpy fallback (useful for benchmarking and for platforms without a compiler).
"""
import os

from cgq import _kernels_py

BACKEND = "python"

if os.environ.get("CGQ_PURE_PYTHON", "").strip().lower() in ("", "0", "false", "no"):
    try:
        from cgq import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

jacobi_eigh = _impl.jacobi_eigh
orbit_block_sum = _impl.orbit_block_sum
haar_block_sum = _impl.haar_block_sum

__all__ = ["BACKEND", "jacobi_eigh", "orbit_block_sum", "haar_block_sum"]
