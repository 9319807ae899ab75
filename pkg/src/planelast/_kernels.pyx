# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: CSR matvec, sequential dot, element stiffness."""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64


def csr_matvec(i64[::1] indptr, i64[::1] indices, f64[::1] data, f64[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.empty(n)
    cdef f64[::1] y = out
    cdef Py_ssize_t i, k
    cdef f64 acc
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        y[i] = acc
    return out


def dot(f64[::1] a, f64[::1] b):
    # Sequential accumulation: bit-stable regardless of BLAS threading.
    cdef Py_ssize_t i
    cdef f64 acc = 0.0
    for i in range(a.shape[0]):
        acc += a[i] * b[i]
    return acc


def element_stiffness_batch(f64[:, :, ::1] coords, f64[::1] mu, f64[::1] lam):
    cdef Py_ssize_t nt = coords.shape[0]
    out = np.empty((nt, 6, 6))
    cdef f64[:, :, ::1] K = out
    cdef Py_ssize_t t, a, b
    cdef f64 x0, x1, x2, y0, y1, y2, two_a, area, lm, mm, l2m
    cdef f64 gx[3]
    cdef f64 gy[3]
    for t in range(nt):
        x0 = coords[t, 0, 0]; y0 = coords[t, 0, 1]
        x1 = coords[t, 1, 0]; y1 = coords[t, 1, 1]
        x2 = coords[t, 2, 0]; y2 = coords[t, 2, 1]
        two_a = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        area = 0.5 * two_a
        gx[0] = (y1 - y2) / two_a
        gx[1] = (y2 - y0) / two_a
        gx[2] = (y0 - y1) / two_a
        gy[0] = (x2 - x1) / two_a
        gy[1] = (x0 - x2) / two_a
        gy[2] = (x1 - x0) / two_a
        lm = lam[t] * area
        mm = mu[t] * area
        l2m = (lam[t] + 2.0 * mu[t]) * area
        # Inner gradient products are grouped first so the block comes out
        # bitwise symmetric.
        for a in range(3):
            for b in range(3):
                K[t, 2 * a, 2 * b] = l2m * (gx[a] * gx[b]) + mm * (gy[a] * gy[b])
                K[t, 2 * a, 2 * b + 1] = lm * (gx[a] * gy[b]) + mm * (gy[a] * gx[b])
                K[t, 2 * a + 1, 2 * b] = lm * (gy[a] * gx[b]) + mm * (gx[a] * gy[b])
                K[t, 2 * a + 1, 2 * b + 1] = l2m * (gy[a] * gy[b]) + mm * (gx[a] * gx[b])
    return out
