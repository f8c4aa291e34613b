"""Backend selection for the decoding kernels.

The compiled extension is used when it imports; otherwise the numpy version.
Setting ``LDPC_ALPHA_BACKEND=python`` forces the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("LDPC_ALPHA_BACKEND", "").lower() not in ("python", "py", "numpy"):
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "compiled"
    except ImportError:
        pass

bp_flood = _impl.bp_flood
bp_grid = _impl.bp_grid


def backends():
    """Available backend modules by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
