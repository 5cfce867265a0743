"""Kernel selection: compiled core when built, pure-Python fallback otherwise.

Set ``PLANAR_ORACLES_PURE=1`` to force the fallback (used by the kernel
benchmark to compare both implementations).
"""

import os

if os.environ.get("PLANAR_ORACLES_PURE"):
    from . import _fallback as impl
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as impl

IMPLEMENTATION = impl.IMPLEMENTATION
dijkstra_arrays = impl.dijkstra_arrays
greedy_graded = impl.greedy_graded
