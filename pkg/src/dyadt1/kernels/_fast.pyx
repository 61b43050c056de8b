# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched cyclic Jacobi eigendecomposition for small symmetric matrices.

Mirrors kernels._ref exactly: same rotation recipe, same stable descending
eigenvalue order, same first-significant-component sign convention.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

BACKEND_NAME = "cython"

cdef double _SIGN_TOL = 1e-8


def jacobi_eigh_batch(mats, double tol=1e-13, int max_sweeps=40):
    """Batched symmetric eigendecomposition; see kernels._ref for semantics."""
    a = np.array(mats, dtype=np.float64, order="C")
    single = a.ndim == 2
    if single:
        a = a[None]
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected (m, n, n) batch, got shape {a.shape}")
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    v = np.empty((m, n, n), dtype=np.float64)
    w = np.empty((m, n), dtype=np.float64)
    cdef double[:, :, ::1] A = a
    cdef double[:, :, ::1] V = v
    cdef double[:, ::1] W = w
    cdef Py_ssize_t k
    with nogil:
        for k in range(m):
            _jacobi_one(A[k], V[k], W[k], n, tol, max_sweeps)
    if single:
        return w[0], v[0]
    return w, v


cdef void _jacobi_one(double[:, ::1] a, double[:, ::1] v, double[::1] w,
                      Py_ssize_t n, double tol, int max_sweeps) nogil:
    cdef Py_ssize_t i, j, p, q, sweep, kk
    cdef double fro, off, thresh, apq, app, aqq, tau, t, c, s, sign
    cdef double xp, xq, lead, colmax, tmpd
    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0
    if n > 1:
        fro = 0.0
        for i in range(n):
            for j in range(n):
                fro += a[i, j] * a[i, j]
        fro = sqrt(fro)
        thresh = tol * (fro if fro > 1e-300 else 1e-300)
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off += a[p, q] * a[p, q]
            off = sqrt(2.0 * off)
            if off <= thresh:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if fabs(apq) <= 1e-300:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    tau = (aqq - app) / (2.0 * apq)
                    sign = 1.0 if tau >= 0.0 else -1.0
                    t = sign / (fabs(tau) + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for i in range(n):
                        xp = a[i, p]
                        xq = a[i, q]
                        a[i, p] = c * xp - s * xq
                        a[i, q] = s * xp + c * xq
                    for i in range(n):
                        xp = a[p, i]
                        xq = a[q, i]
                        a[p, i] = c * xp - s * xq
                        a[q, i] = s * xp + c * xq
                    for i in range(n):
                        xp = v[i, p]
                        xq = v[i, q]
                        v[i, p] = c * xp - s * xq
                        v[i, q] = s * xp + c * xq
    for i in range(n):
        w[i] = a[i, i]
    # stable descending order by eigenvalue (insertion sort moving columns)
    for i in range(1, n):
        tmpd = w[i]
        for kk in range(n):
            a[kk, 0] = v[kk, i]  # reuse a's first column as scratch
        j = i
        while j > 0 and w[j - 1] < tmpd:
            w[j] = w[j - 1]
            for kk in range(n):
                v[kk, j] = v[kk, j - 1]
            j -= 1
        w[j] = tmpd
        for kk in range(n):
            v[kk, j] = a[kk, 0]
    # sign fix: first component above _SIGN_TOL * column max must be positive
    for j in range(n):
        colmax = 0.0
        for i in range(n):
            if fabs(v[i, j]) > colmax:
                colmax = fabs(v[i, j])
        if colmax <= 1e-300:
            continue
        lead = 0.0
        for i in range(n):
            if fabs(v[i, j]) > _SIGN_TOL * colmax:
                lead = v[i, j]
                break
        if lead < 0.0:
            for i in range(n):
                v[i, j] = -v[i, j]
