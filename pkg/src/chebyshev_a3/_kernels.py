"""Kernel dispatch: the compiled extension when available, else numpy.

Set CHEBYSHEV_A3_PURE=1 to force the numpy versions.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("CHEBYSHEV_A3_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

poly_eval = _impl.poly_eval
homogeneous_eval = _impl.homogeneous_eval
fold_batch = _impl.fold_batch
ROOTS = _pykernels.ROOTS
