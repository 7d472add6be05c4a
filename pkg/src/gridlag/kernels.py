"""Backend selection for the hot rectangle loops.

The compiled extension ``gridlag._ckernels`` is used when it imports;
otherwise the pure-Python module takes over.  Set ``GRIDLAG_PURE=1`` to
force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels
from ._enumerate import BudgetExceeded, enumerate_slice, grading_histogram

_impl = _pykernels
if os.environ.get("GRIDLAG_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
forward_targets = _impl.forward_targets
reverse_sources = _impl.reverse_sources
forward_batch = _impl.forward_batch
reverse_batch = _impl.reverse_batch

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "forward_targets",
    "reverse_sources",
    "forward_batch",
    "reverse_batch",
    "enumerate_slice",
    "grading_histogram",
]
