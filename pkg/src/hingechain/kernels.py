"""Backend selection for the evaluation kernels.

Prefers the compiled extension and falls back to the NumPy implementation
when it is not built.  Set HINGECHAIN_DISABLE_EXT=1 to force the fallback
(used by the benchmark to compare both backends).
"""

import os

from . import _kernels_py

if os.environ.get("HINGECHAIN_DISABLE_EXT", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

endpoint_batch = _impl.endpoint_batch
f_batch = _impl.f_batch
fgrad_batch = _impl.fgrad_batch
