"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation is used. Set ``OPA_METROLOGY_PURE=1`` to force the numpy path.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("OPA_METROLOGY_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels_c as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

lossy_moments = _impl.lossy_moments
projected_samples = _impl.projected_samples

__all__ = ["BACKEND", "lossy_moments", "projected_samples"]
