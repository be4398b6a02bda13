"""Kernel backend selection.

The compiled extension is preferred when importable; set
SAFECOMB_KERNELS=python or SAFECOMB_KERNELS=native to force a backend
(forcing native raises if the extension is missing).
"""

from __future__ import annotations

import os

_requested = os.environ.get("SAFECOMB_KERNELS", "").strip().lower()

if _requested == "python":
    from . import _fallback as _impl
elif _requested == "native":
    from . import _native as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _fallback as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND_NAME
core_distances = _impl.core_distances
mst_edges = _impl.mst_edges
bootstrap_mean_diffs = _impl.bootstrap_mean_diffs

__all__ = ["BACKEND", "core_distances", "mst_edges", "bootstrap_mean_diffs"]
