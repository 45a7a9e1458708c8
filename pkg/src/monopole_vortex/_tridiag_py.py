"""Pure-Python tridiagonal kernels (fallback when the compiled module is absent).

The matrix is given by its diagonal ``d`` and off-diagonal ``e``; ``e2`` holds
the squared off-diagonal.  All three routines are O(n) per call.
"""

import math

import numpy as np

EPS = 2.220446049250313e-16


def sturm_count(d, e2, x, pivmin):
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia count)."""
    if not isinstance(d, list):
        d = d.tolist()
        e2 = e2.tolist()
    return _count(d, e2, x, pivmin)


def _count(d, e2, x, pivmin):
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0 else 0
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def bisect_eigenvalue(d, e2, index, lo, hi, abstol, pivmin, max_iter):
    """Bisect ``[lo, hi]`` down to the eigenvalue of 0-based rank ``index``.

    Stops when the bracket is narrower than ``max(abstol, 4 eps max(|lo|, |hi|))``
    or cannot be split further.  Returns ``(value, iterations)``.
    """
    d = d.tolist()
    e2 = e2.tolist()
    it = 0
    while it < max_iter:
        width = max(abstol, 4.0 * EPS * max(abs(lo), abs(hi)))
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count(d, e2, mid, pivmin) > index:
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi), it


def inverse_iterate(d, e, shift, v, pivfloor):
    """One step of inverse iteration: solve ``(T - shift) x = v`` and normalize.

    Gaussian elimination with partial pivoting; pivots smaller than
    ``pivfloor`` are replaced by it so an exact eigenvalue shift stays solvable.
    """
    n = len(d)
    dd = [di - shift for di in d.tolist()]
    dl = e.tolist()
    du = list(dl)
    du2 = [0.0] * max(n - 2, 0)
    piv = [False] * max(n - 1, 0)
    b = list(np.asarray(v, dtype=float).tolist())

    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if abs(dd[i]) < pivfloor:
                dd[i] = pivfloor
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] -= fact * du[i]
        else:
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = temp - fact * dd[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            piv[i] = True
    if abs(dd[n - 1]) < pivfloor:
        dd[n - 1] = pivfloor

    for i in range(n - 1):
        if piv[i]:
            temp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = temp - dl[i] * b[i]
        else:
            b[i + 1] -= dl[i] * b[i]
    b[n - 1] /= dd[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i]

    acc = 0.0
    for x in b:
        acc += x * x
    norm = math.sqrt(acc)
    return np.array([x / norm for x in b])
