"""Evaluation: the reduction machine and search-tree enumeration.

The machine is compiled with Cython when available; ``MINICURRY_PURE=1``
forces the pure-Python implementation.
"""

import os

if os.environ.get("MINICURRY_PURE"):
    from . import _machine as machine
else:
    try:
        from . import _cmachine as machine
    except ImportError:
        from . import _machine as machine

IMPLEMENTATION = "compiled" if machine.__name__.endswith("_cmachine") else "python"

from .search import (  # noqa: E402
    BFS,
    DFS,
    Answer,
    Choice,
    Exhausted,
    Fail,
    Result,
    SearchTree,
    Suspended,
    Val,
    enumerate_tree,
)

__all__ = [
    "Answer",
    "BFS",
    "Choice",
    "DFS",
    "Exhausted",
    "Fail",
    "IMPLEMENTATION",
    "Result",
    "SearchTree",
    "Suspended",
    "Val",
    "enumerate_tree",
    "machine",
]
