"""Backend selection for the tridiagonal kernels.

The compiled module is used when it imports; otherwise the pure-Python one.
Setting ``MONOPOLE_VORTEX_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _tridiag_py

try:
    if os.environ.get("MONOPOLE_VORTEX_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _tridiag_c
except ImportError:
    _tridiag_c = None

BACKENDS = {"python": _tridiag_py}
if _tridiag_c is not None:
    BACKENDS["compiled"] = _tridiag_c

_active = _tridiag_c if _tridiag_c is not None else _tridiag_py


def backend_name():
    return "compiled" if _active is _tridiag_c and _tridiag_c is not None else "python"


def use_backend(name):
    """Switch kernels at runtime ("compiled" or "python"); returns the previous name."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    previous = backend_name()
    _active = BACKENDS[name]
    return previous


def sturm_count(d, e2, x, pivmin):
    return _active.sturm_count(d, e2, x, pivmin)


def bisect_eigenvalue(d, e2, index, lo, hi, abstol, pivmin, max_iter):
    return _active.bisect_eigenvalue(d, e2, index, lo, hi, abstol, pivmin, max_iter)


def inverse_iterate(d, e, shift, v, pivfloor):
    return _active.inverse_iterate(d, e, shift, v, pivfloor)
