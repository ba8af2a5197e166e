"""Optional numba acceleration.

Set ``PQWOLFF_DISABLE_NUMBA=1`` to run every kernel through the pure-numpy
path instead of the compiled loops.
"""

import os
import warnings

_FLAG = os.environ.get("PQWOLFF_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None
    if not _DISABLED:
        warnings.warn("numba not found; falling back to the numpy kernels")

NUMBA_AVAILABLE = _nb is not None
USE_NUMBA = NUMBA_AVAILABLE and not _DISABLED


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is usable, else return it as is."""
    if not NUMBA_AVAILABLE:
        return fn
    return _nb.njit(cache=True, fastmath=False)(fn)


def py(fn):
    """The undecorated python function behind a numba dispatcher."""
    return getattr(fn, "py_func", fn)


def default_backend():
    return "numba" if USE_NUMBA else "numpy"


def resolve_backend(backend):
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
