"""Propagation kernels: compiled backend with pure-NumPy fallback.

The Cython extension is used when available; set ``DRIVEPHASE_NO_EXT=1`` to
force the NumPy implementation (used by tests and benchmarks to compare the
two backends).
"""
from __future__ import annotations

import os

from . import _ref

if os.environ.get("DRIVEPHASE_NO_EXT"):
    _impl = _ref
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

BACKEND: str = _impl.BACKEND

su2_product = _impl.su2_product
density_product = _impl.density_product
sequence_product = _impl.sequence_product
conjugated_product = _impl.conjugated_product

__all__ = [
    "BACKEND",
    "su2_product",
    "density_product",
    "sequence_product",
    "conjugated_product",
]
