"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise,
or when ``TREKCALC_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("TREKCALC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

sided_free_assignments = _impl.sided_free_assignments
partial_corr_batch = _impl.partial_corr_batch
