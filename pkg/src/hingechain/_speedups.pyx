# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels (hot inner loops of the library).

Contract mirrors ``_kernels_py``: batched end-point, squared-distance and
gradient evaluation for a packed chain.  See that module for the packing
and the rotation recurrence.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def endpoint_batch(const double[:, ::1] base, const double[:, ::1] u, const double[:, ::1] w,
                   const double[::1] x, const double[:, ::1] thetas):
    cdef Py_ssize_t m = thetas.shape[0]
    cdef Py_ssize_t n = base.shape[0]
    cdef Py_ssize_t d = base.shape[1]
    out = np.empty((m, d), dtype=np.float64)
    cdef double[:, ::1] p = out
    cdef Py_ssize_t r, i, c
    cdef double ct, st, xi, eta, dxi, deta, q
    with nogil:
        for r in range(m):
            for c in range(d):
                p[r, c] = x[c]
            for i in range(n - 1, -1, -1):
                ct = cos(thetas[r, i])
                st = sin(thetas[r, i])
                xi = 0.0
                eta = 0.0
                for c in range(d):
                    q = p[r, c] - base[i, c]
                    xi += q * u[i, c]
                    eta += q * w[i, c]
                dxi = (ct - 1.0) * xi - st * eta
                deta = st * xi + (ct - 1.0) * eta
                for c in range(d):
                    p[r, c] += dxi * u[i, c] + deta * w[i, c]
    return out


def f_batch(const double[:, ::1] base, const double[:, ::1] u, const double[:, ::1] w,
            const double[::1] x, const double[:, ::1] thetas):
    cdef Py_ssize_t m = thetas.shape[0]
    cdef Py_ssize_t n = base.shape[0]
    cdef Py_ssize_t d = base.shape[1]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] fv = out
    cdef double[::1] p = np.empty(d, dtype=np.float64)
    cdef Py_ssize_t r, i, c
    cdef double ct, st, xi, eta, dxi, deta, q, acc
    with nogil:
        for r in range(m):
            for c in range(d):
                p[c] = x[c]
            for i in range(n - 1, -1, -1):
                ct = cos(thetas[r, i])
                st = sin(thetas[r, i])
                xi = 0.0
                eta = 0.0
                for c in range(d):
                    q = p[c] - base[i, c]
                    xi += q * u[i, c]
                    eta += q * w[i, c]
                dxi = (ct - 1.0) * xi - st * eta
                deta = st * xi + (ct - 1.0) * eta
                for c in range(d):
                    p[c] += dxi * u[i, c] + deta * w[i, c]
            acc = 0.0
            for c in range(d):
                acc += p[c] * p[c]
            fv[r] = acc
    return out


def fgrad_batch(const double[:, ::1] base, const double[:, ::1] u, const double[:, ::1] w,
                const double[::1] x, const double[:, ::1] thetas):
    cdef Py_ssize_t m = thetas.shape[0]
    cdef Py_ssize_t n = base.shape[0]
    cdef Py_ssize_t d = base.shape[1]
    f_out = np.empty(m, dtype=np.float64)
    g_out = np.empty((m, n), dtype=np.float64)
    cdef double[::1] fv = f_out
    cdef double[:, ::1] gv = g_out
    cdef double[::1] p = np.empty(d, dtype=np.float64)
    cdef double[::1] pxi = np.empty(n, dtype=np.float64)
    cdef double[::1] peta = np.empty(n, dtype=np.float64)
    cdef double[::1] cth = np.empty(n, dtype=np.float64)
    cdef double[::1] sth = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t r, i, c
    cdef double ct, st, xi, eta, nxi, neta, q, acc, gu, gw, ngu, ngw
    with nogil:
        for r in range(m):
            for c in range(d):
                p[c] = x[c]
            for i in range(n - 1, -1, -1):
                ct = cos(thetas[r, i])
                st = sin(thetas[r, i])
                cth[i] = ct
                sth[i] = st
                xi = 0.0
                eta = 0.0
                for c in range(d):
                    q = p[c] - base[i, c]
                    xi += q * u[i, c]
                    eta += q * w[i, c]
                nxi = ct * xi - st * eta
                neta = st * xi + ct * eta
                pxi[i] = nxi
                peta[i] = neta
                for c in range(d):
                    p[c] += (nxi - xi) * u[i, c] + (neta - eta) * w[i, c]
            acc = 0.0
            for c in range(d):
                acc += p[c] * p[c]
            fv[r] = acc
            for i in range(n):
                gu = 0.0
                gw = 0.0
                for c in range(d):
                    gu += p[c] * u[i, c]
                    gw += p[c] * w[i, c]
                gv[r, i] = 2.0 * (pxi[i] * gw - peta[i] * gu)
                ngu = cth[i] * gu + sth[i] * gw
                ngw = -sth[i] * gu + cth[i] * gw
                for c in range(d):
                    p[c] += (ngu - gu) * u[i, c] + (ngw - gw) * w[i, c]
    return f_out, g_out
