"""Select the kernel implementation at import time.

The compiled extension is preferred; set ``FAIRLENS_NO_EXT=1`` to force the
numpy fallback (used by the benchmark and by the cross-backend tests).
"""
import os

from fairlens import _kernels as python_kernels

try:
    from fairlens import _core as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("FAIRLENS_NO_EXT", "") in ("", "0"):
    kernels = compiled_kernels
    BACKEND = "cython"
else:
    kernels = python_kernels
    BACKEND = "python"


def available():
    """Return the names of the backends importable in this environment."""
    names = ["python"]
    if compiled_kernels is not None:
        names.insert(0, "cython")
    return names


def get(name):
    if name == "cython":
        if compiled_kernels is None:
            raise ImportError("fairlens._core extension is not built")
        return compiled_kernels
    if name == "python":
        return python_kernels
    raise ValueError(f"unknown backend {name!r}")
