"""Kernel backend selection.

The compiled core is used when it was built; set ``ENTIREDYN_PURE=1`` to
force the numpy fallback.
"""
import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}
try:
    from . import _kernels
    BACKENDS["cython"] = _kernels
except ImportError:  # extension not built
    pass

if os.environ.get("ENTIREDYN_PURE", "") in ("1", "true", "yes") or "cython" not in BACKENDS:
    BACKEND = "python"
else:
    BACKEND = "cython"
_impl = BACKENDS[BACKEND]

classify_points = _impl.classify_points
step_points = _impl.step_points


def get_backend(name=None):
    if name is None:
        return _impl
    return BACKENDS[name]
