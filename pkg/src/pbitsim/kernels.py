"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
implementation is used. Set ``PBITSIM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("PBITSIM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

tick_decide = _impl.tick_decide
gillespie_events = _impl.gillespie_events
sequential_sweeps = _impl.sequential_sweeps


def backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
