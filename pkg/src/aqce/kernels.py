"""Backend selection for the statevector hot loops.

The compiled extension is used when available; set AQCE_PURE_PYTHON=1 to
force the numpy fallback (used by the kernel benchmark and the fallback
tests). `BACKEND` records which implementation won.
"""
from __future__ import annotations

import os

from . import _kernels_py

_impl = None
if not os.environ.get("AQCE_PURE_PYTHON"):
    try:
        from . import _statevec_core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = None

if _impl is None:
    _impl = _kernels_py
    BACKEND = "python"
else:
    BACKEND = "compiled"

apply_matrix4 = _impl.apply_matrix4
fidelity_tensor4 = _impl.fidelity_tensor4
