"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over.  Set ``VSC_BACKEND=python`` to force the fallback
(``VSC_BACKEND=compiled`` makes a missing extension an ImportError).
"""
import logging
import os

from vsc import _pykernels

log = logging.getLogger(__name__)

_requested = os.environ.get("VSC_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _pykernels
else:
    try:
        from vsc import _ckernels as _impl
    except ImportError:
        if _requested == "compiled":
            raise
        log.debug("compiled kernels unavailable, using numpy fallback")
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

confidence_matrix = _impl.confidence_matrix
feature_matrix = _impl.feature_matrix
gram = _impl.gram
cholesky = _impl.cholesky
cho_solve = _impl.cho_solve


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from vsc import _ckernels
    except ImportError:
        pass
    else:
        out["compiled"] = _ckernels
    return out
