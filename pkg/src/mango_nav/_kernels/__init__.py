"""Numeric kernels: compiled core when available, pure-Python fallback.

Set MANGO_NAV_PURE=1 to force the fallback (used by the parity tests and
the kernel benchmark). Both backends are bit-identical by contract.
"""

import os

if os.environ.get("MANGO_NAV_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND = _impl.BACKEND
Rng = _impl.Rng
bm25_scores = _impl.bm25_scores

__all__ = ["BACKEND", "Rng", "bm25_scores"]
