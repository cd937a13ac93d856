"""Kernel selection: the compiled extension when importable, else the Python fallback.

Set EVOKIT_PURE=1 to force the fallback (used by the benchmark and tests).
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
if os.environ.get("EVOKIT_PURE", "") in ("", "0"):
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

principal_index_int = _impl.principal_index_int
lm_bq_batch = _impl.lm_bq_batch
bq_residuals = _fallback.bq_residuals
