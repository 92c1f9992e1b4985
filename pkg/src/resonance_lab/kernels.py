"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when
``RESONANCE_LAB_PURE=1`` is set, the pure-Python versions are used.  The
compiled elimination works in int64 and falls back to Python integers on
overflow, so results never depend on the backend.
"""
from __future__ import annotations

import logging
import os

import numpy as np

from . import _pykernels

log = logging.getLogger(__name__)

_c = None
if os.environ.get("RESONANCE_LAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _c
    except ImportError:  # extension not built
        _c = None

BACKEND = "cython" if _c is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _c is not None else [])


def echelon(indptr, indices, data, ncols, backend=None):
    """``(rank, pivot_rows)`` of an integer CSR matrix."""
    backend = backend or BACKEND
    if backend == "cython" and _c is not None:
        try:
            return _c.echelon(np.ascontiguousarray(indptr, dtype=np.int64),
                              np.ascontiguousarray(indices, dtype=np.int64),
                              np.ascontiguousarray(data, dtype=np.int64), int(ncols))
        except OverflowError:
            log.debug("int64 overflow in compiled elimination, using big integers")
    return _pykernels.echelon(indptr, indices, data, ncols)


def echelon_rank(indptr, indices, data, ncols, backend=None) -> int:
    return echelon(indptr, indices, data, ncols, backend)[0]


def ideal_rows(low_masks, rel_indptr, rel_masks, rel_coefs, N, k, backend=None):
    backend = backend or BACKEND
    if backend == "cython" and _c is not None and N <= 64:
        try:
            return _c.ideal_rows(np.asarray(low_masks, dtype=np.uint64),
                                 np.asarray(rel_indptr, dtype=np.int64),
                                 np.asarray(rel_masks, dtype=np.uint64),
                                 np.asarray(rel_coefs, dtype=np.int64), int(N), int(k))
        except OverflowError:
            pass
    return _pykernels.ideal_rows(low_masks, rel_indptr, rel_masks, rel_coefs, N, k)
