"""Backend selection for the hot loops.

The Cython extension ``mattekit._native`` is used when it was built; the
numpy versions in ``mattekit._pykernels`` are used otherwise, or when the
environment variable ``MATTEKIT_BACKEND=python`` is set before import.

Both backends expose the same two functions:

``rb_sweep(F, B, C, alpha, lam, color, omega)``
    One red or black half-sweep of the foreground/background Gauss-Seidel
    solver with over-relaxation ``omega``, updating ``F`` and ``B`` in place.
``box_sum(src, r)``
    Window sums of radius ``r`` with windows truncated at the image border.
"""
import os
from types import ModuleType

import numpy as np

from . import _pykernels

try:
    from . import _native
except ImportError:  # extension not built
    _native = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _native is not None:
    BACKENDS["native"] = _native

_requested = os.environ.get("MATTEKIT_BACKEND", "").strip().lower()
if _requested and _requested not in ("native", "python"):
    raise ImportError(f"MATTEKIT_BACKEND must be 'native' or 'python', got {_requested!r}")
if _requested == "native" and _native is None:
    raise ImportError("MATTEKIT_BACKEND=native but the compiled extension is not available")

BACKEND = _requested or ("native" if _native is not None else "python")


def get(name: str | None = None) -> ModuleType:
    """Return the kernel module ``name`` (default: the active backend)."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {sorted(BACKENDS)}") from None


def rb_sweep(F, B, C, alpha, lam, color, omega=1.0, backend=None):
    get(backend).rb_sweep(F, B, C, alpha, float(lam), int(color), float(omega))


def box_sum(src, r, backend=None):
    src = np.ascontiguousarray(src, dtype=np.float64)
    return np.asarray(get(backend).box_sum(src, int(r)))
