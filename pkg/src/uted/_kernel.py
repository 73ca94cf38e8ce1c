"""Kernel lane selection: compiled extension if present, else pure Python.

Set ``UTED_FORCE_PURE=1`` to skip the compiled core even when built.
Both lanes export the same functions; ``uted.bench`` imports them side by
side to compare.
"""

from __future__ import annotations

import os

from . import _core_py

if os.environ.get("UTED_FORCE_PURE"):
    kernel = _core_py
else:
    try:
        from . import _core as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _core_py

KERNEL_KIND: str = kernel.KERNEL_KIND
NEG_INF: int = kernel.NEG_INF
