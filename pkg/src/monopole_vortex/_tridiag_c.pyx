# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tridiagonal kernels: Sturm counts, bisection, inverse iteration.

Signatures and results match ``_tridiag_py`` exactly; see that module for the
reference description of each routine.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmax, sqrt

cnp.import_array()

cdef double EPS = 2.220446049250313e-16


cdef Py_ssize_t _count(const double[::1] d, const double[::1] e2, double x, double pivmin) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef double q = d[0] - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def sturm_count(double[::1] d, double[::1] e2, double x, double pivmin):
    return _count(d, e2, x, pivmin)


def bisect_eigenvalue(double[::1] d, double[::1] e2, Py_ssize_t index,
                      double lo, double hi, double abstol, double pivmin,
                      int max_iter):
    cdef int it = 0
    cdef double mid, width
    with nogil:
        while it < max_iter:
            width = fmax(abstol, 4.0 * EPS * fmax(fabs(lo), fabs(hi)))
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


def inverse_iterate(double[::1] d, double[::1] e, double shift,
                    double[::1] v, double pivfloor):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i
    cdef double fact, temp, norm
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dd_a = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dl_a = np.zeros(max(n - 1, 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] du_a = np.zeros(max(n - 1, 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] du2_a = np.zeros(max(n - 2, 1))
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] piv_a = np.zeros(max(n - 1, 1), dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b_a = np.array(v, dtype=np.float64, copy=True)
    cdef double[::1] dd = dd_a
    cdef double[::1] dl = dl_a
    cdef double[::1] du = du_a
    cdef double[::1] du2 = du2_a
    cdef unsigned char[::1] piv = piv_a
    cdef double[::1] b = b_a

    with nogil:
        for i in range(n):
            dd[i] = d[i] - shift
        for i in range(n - 1):
            dl[i] = e[i]
            du[i] = e[i]
        for i in range(n - 1):
            if fabs(dd[i]) >= fabs(dl[i]):
                if fabs(dd[i]) < pivfloor:
                    dd[i] = pivfloor
                fact = dl[i] / dd[i]
                dl[i] = fact
                dd[i + 1] = dd[i + 1] - fact * du[i]
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
                piv[i] = 1
        if fabs(dd[n - 1]) < pivfloor:
            dd[n - 1] = pivfloor

        for i in range(n - 1):
            if piv[i]:
                temp = b[i]
                b[i] = b[i + 1]
                b[i + 1] = temp - dl[i] * b[i]
            else:
                b[i + 1] = b[i + 1] - dl[i] * b[i]
        b[n - 1] = b[n - 1] / dd[n - 1]
        if n > 1:
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2]
        i = n - 3
        while i >= 0:
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i]
            i -= 1

        norm = 0.0
        for i in range(n):
            norm += b[i] * b[i]
        norm = sqrt(norm)
        for i in range(n):
            b[i] = b[i] / norm
    return b_a
