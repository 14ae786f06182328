"""Select the compiled kernels when available, else the numpy fallback."""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("BASISPURSUIT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

gs_extend = _impl.gs_extend
column_rank = _impl.column_rank
first_rank_drop = _impl.first_rank_drop
first_refuting_removal = _impl.first_refuting_removal

__all__ = ["BACKEND", "gs_extend", "column_rank", "first_rank_drop", "first_refuting_removal"]
