"""Kernel backend selection.

Uses the compiled Cython extension when it was built, otherwise the
pure-Python fallback.  Setting ``WORDMAPS_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("WORDMAPS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

fold = _impl.fold
children = _impl.children
count_cycles_batch = _impl.count_cycles_batch
bruteforce_histogram = _impl.bruteforce_histogram


def backend_module(name):
    """Return the kernel module for ``"python"`` or ``"cython"`` (for benchmarks/tests)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
