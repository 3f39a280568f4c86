"""Kernel backend selection.

PLATELAB_BACKEND=numba (default) compiles the hot kernels with numba;
PLATELAB_BACKEND=numpy selects the vectorized pure-numpy twins.  If numba
is requested but cannot be imported the numpy path is used silently.
"""

import os

_requested = os.environ.get("PLATELAB_BACKEND", "numba").strip().lower()

if _requested not in ("numba", "numpy"):
    raise ImportError(
        "PLATELAB_BACKEND must be 'numba' or 'numpy', got %r" % _requested)

if _requested == "numba":
    try:
        from . import _kernels_numba as kernels
    except ImportError:
        from . import _kernels_numpy as kernels
else:
    from . import _kernels_numpy as kernels

BACKEND = kernels.BACKEND_NAME


def get_kernels(name=None):
    """Return a kernel module: the active one, or by explicit name."""
    if name is None:
        return kernels
    if name == "numba":
        from . import _kernels_numba
        return _kernels_numba
    if name == "numpy":
        from . import _kernels_numpy
        return _kernels_numpy
    raise ValueError("unknown backend %r" % name)
