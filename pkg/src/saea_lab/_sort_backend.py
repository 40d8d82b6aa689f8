"""Selects the sort kernel at import: compiled extension when available,
pure Python otherwise. Set SAEA_LAB_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

_force_pure = os.environ.get("SAEA_LAB_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    from ._sort_pure import sort_core

    BACKEND = "pure-python (forced)"
else:
    try:
        from ._sort_ext import sort_core  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from ._sort_pure import sort_core  # type: ignore[no-redef]

        BACKEND = "pure-python"

__all__ = ["sort_core", "BACKEND"]
