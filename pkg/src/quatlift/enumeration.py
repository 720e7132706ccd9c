"""Backend dispatch for the enumeration kernel.

The compiled extension is used when it imported successfully and the
input fits its int64/double margins; otherwise the exact pure-Python
implementation runs.  Both produce identical counts.  Set the
environment variable QUATLIFT_BACKEND=python before import to force
the fallback (used by the benchmark and the cross-checking tests).
"""

from __future__ import annotations

import os

from . import _enum_py
from ._enum_py import DEFAULT_MAX_NODES, half_vectors

try:
    from . import _enumcore
except ImportError:  # pure-Python install
    _enumcore = None

if os.environ.get("QUATLIFT_BACKEND") == "python":
    _enumcore = None


def backend_name() -> str:
    return "compiled" if _enumcore is not None else "python"


def count_by_value(g2, bound: int, max_nodes: int = DEFAULT_MAX_NODES) -> list[int]:
    """counts[m] = #{x : Q(x) = m}, 0 <= m <= bound; Q given by even Gram of 2Q."""
    if _enumcore is not None:
        try:
            return _enumcore.count_by_value(g2, bound, max_nodes)
        except OverflowError:
            pass  # input beyond the kernel's margins; use the exact path
    return _enum_py.count_by_value(g2, bound, max_nodes)


__all__ = ["count_by_value", "half_vectors", "backend_name", "DEFAULT_MAX_NODES"]
