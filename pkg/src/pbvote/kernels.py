"""Kernel selection: compiled extension if available, numpy fallback if not.

Set ``PBVOTE_PURE=1`` to force the fallback (useful for benchmarking and
for debugging suspected kernel discrepancies).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("PBVOTE_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

IMPLEMENTATION: str = _impl.IMPLEMENTATION

score_profile = _impl.score_profile
select_top = _impl.select_top
expand_amounts = _impl.expand_amounts
overlap_many = _impl.overlap_many
dot_expanded = _impl.dot_expanded
count_complete = _impl.count_complete
enumerate_complete = _impl.enumerate_complete
sweep_utilities = _impl.sweep_utilities
