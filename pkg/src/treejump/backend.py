"""Kernel backend selection.

The compiled extension is preferred when importable; the pure numpy
fallback is always available.  Override with TREEJUMP_BACKEND=pure|compiled
(requesting an unavailable compiled backend raises at import).  Both
backends implement the same functions with identical random-stream
consumption, so results match draw-for-draw.
"""

from __future__ import annotations

import os

from . import _slow

_requested = os.environ.get("TREEJUMP_BACKEND", "").strip().lower()

if _requested == "pure":
    kernels = _slow
else:
    try:
        from . import _fast as kernels  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "TREEJUMP_BACKEND=compiled but the treejump._fast extension is not built"
            )
        kernels = _slow

BACKEND: str = kernels.BACKEND


def get_kernels(name: str | None = None):
    """Return a kernel module by name ('pure' or 'compiled'); default current."""
    if name is None:
        return kernels
    if name == "pure":
        return _slow
    if name == "compiled":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")
