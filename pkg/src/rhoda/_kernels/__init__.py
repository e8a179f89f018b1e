"""Hot graph kernels with a compiled core and a numpy fallback.

The compiled Cython module is used when it was built and importable; setting
``RHODA_PURE_PYTHON=1`` in the environment forces the fallback.  ``BACKEND``
names the active implementation.
"""

import os

from . import _pykernels as python

try:
    if os.environ.get("RHODA_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

_active = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

bfs_all_pairs = _active.bfs_all_pairs
next_hops = _active.next_hops
push_loads = _active.push_loads
hungarian = _active.hungarian
greedy_add_edges = _active.greedy_add_edges

__all__ = [
    "BACKEND",
    "bfs_all_pairs",
    "compiled",
    "greedy_add_edges",
    "hungarian",
    "next_hops",
    "push_loads",
    "python",
]
