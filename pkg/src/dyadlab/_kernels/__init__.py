"""Kernel backend selection: compiled Cython core when available, NumPy
fallback otherwise.  Set DYADLAB_PURE=1 to force the fallback."""
from __future__ import annotations

import os

from . import pure

_core = None
if not os.environ.get("DYADLAB_PURE"):
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "pure"
_impl = _core if _core is not None else pure

min_mass_prefix = _impl.min_mass_prefix
weak_dual_prefix = _impl.weak_dual_prefix
max_ratio_prefix = _impl.max_ratio_prefix
maximal_paint = _impl.maximal_paint


def get_backend() -> str:
    return BACKEND
