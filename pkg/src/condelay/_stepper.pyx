# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integration kernels: RK4 with cubic Hermite delayed lookup.

Mirrors _stepper_py exactly; selected at import when available.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()

BACKEND = "compiled"


cdef inline void _matvec(const double[:, ::1] M, const double* x, double* out, Py_ssize_t m) nogil:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(m):
        acc = 0.0
        for j in range(m):
            acc += M[i, j] * x[j]
        out[i] = acc


cdef void _lookup(double[:, ::1] X, double[:, ::1] D, const double[:, ::1] hist,
                  Py_ssize_t qmax, double tau, double h,
                  Py_ssize_t q, Py_ssize_t filled, double* out, Py_ssize_t m) nogil:
    cdef Py_ssize_t j, i
    cdef double t, th, a, b, c, d
    if q <= qmax:
        for i in range(m):
            out[i] = hist[q, i]
        return
    t = q * (h / 2.0) - tau
    j = <Py_ssize_t>(t / h)
    if j > filled - 1:
        j = filled - 1
    if j < 0:
        j = 0
    th = t / h - j
    a = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th)
    b = th * (1.0 - th) * (1.0 - th)
    c = th * th * (3.0 - 2.0 * th)
    d = th * th * (th - 1.0)
    for i in range(m):
        out[i] = a * X[j, i] + (b * h) * D[j, i] + c * X[j + 1, i] + (d * h) * D[j + 1, i]


def integrate_dde(const double[:, ::1] F, const double[:, ::1] G, double h, Py_ssize_t nsteps,
                  const double[::1] x0, const double[:, ::1] hist, Py_ssize_t qmax, double tau):
    """Integrate ``x' = F x(t) + G x(t - tau)`` on a fixed grid.

    hist[q] holds the history at ``t = q*h/2 - tau`` for q <= qmax (t <= 0).
    Returns (X, D, diverged_at), diverged_at = -1 when every state is finite.
    """
    cdef Py_ssize_t m = x0.shape[0]
    X_arr = np.empty((nsteps + 1, m))
    D_arr = np.empty((nsteps + 1, m))
    cdef double[:, ::1] X = X_arr
    cdef double[:, ::1] D = D_arr
    work_arr = np.empty((7, m))
    cdef double[:, ::1] W = work_arr
    cdef double* xd_half
    cdef double* xd_full
    cdef Py_ssize_t n, i
    cdef bint bad

    with nogil:
        for i in range(m):
            X[0, i] = x0[i]
        # D[0] = F x0 + G hist(t=-tau)
        _matvec(F, &X[0, 0], &W[0, 0], m)
        _matvec(G, &hist[0, 0], &W[1, 0], m)
        for i in range(m):
            D[0, i] = W[0, i] + W[1, i]

        for n in range(nsteps):
            xd_half = &W[5, 0]
            xd_full = &W[6, 0]
            _lookup(X, D, hist, qmax, tau, h, 2 * n + 1, n, xd_half, m)
            _lookup(X, D, hist, qmax, tau, h, 2 * n + 2, n, xd_full, m)

            # k1 = D[n]; stages reuse W rows: 0 tmp-state, 1 Fx, 2 k2, 3 k3, 4 k4
            for i in range(m):
                W[0, i] = X[n, i] + (0.5 * h) * D[n, i]
            _matvec(F, &W[0, 0], &W[1, 0], m)
            _matvec(G, xd_half, &W[2, 0], m)
            for i in range(m):
                W[2, i] = W[1, i] + W[2, i]          # k2
                W[0, i] = X[n, i] + (0.5 * h) * W[2, i]
            _matvec(F, &W[0, 0], &W[1, 0], m)
            _matvec(G, xd_half, &W[3, 0], m)
            for i in range(m):
                W[3, i] = W[1, i] + W[3, i]          # k3
                W[0, i] = X[n, i] + h * W[3, i]
            _matvec(F, &W[0, 0], &W[1, 0], m)
            _matvec(G, xd_full, &W[4, 0], m)
            bad = False
            for i in range(m):
                W[4, i] = W[1, i] + W[4, i]          # k4
                X[n + 1, i] = X[n, i] + (h / 6.0) * (
                    D[n, i] + 2.0 * (W[2, i] + W[3, i]) + W[4, i])
                if not isfinite(X[n + 1, i]):
                    bad = True
            if bad:
                with gil:
                    return X_arr, D_arr, n + 1
            _matvec(F, &X[n + 1, 0], &W[0, 0], m)
            _matvec(G, xd_full, &W[1, 0], m)
            for i in range(m):
                D[n + 1, i] = W[0, i] + W[1, i]
    return X_arr, D_arr, -1


def integrate_ode(const double[:, ::1] F, double h, Py_ssize_t nsteps, const double[::1] x0):
    """Plain RK4 for the delay-free case ``x' = F x``."""
    cdef Py_ssize_t m = x0.shape[0]
    X_arr = np.empty((nsteps + 1, m))
    cdef double[:, ::1] X = X_arr
    work_arr = np.empty((5, m))
    cdef double[:, ::1] W = work_arr
    cdef Py_ssize_t n, i
    cdef bint bad

    with nogil:
        for i in range(m):
            X[0, i] = x0[i]
        for n in range(nsteps):
            _matvec(F, &X[n, 0], &W[1, 0], m)        # k1
            for i in range(m):
                W[0, i] = X[n, i] + (0.5 * h) * W[1, i]
            _matvec(F, &W[0, 0], &W[2, 0], m)        # k2
            for i in range(m):
                W[0, i] = X[n, i] + (0.5 * h) * W[2, i]
            _matvec(F, &W[0, 0], &W[3, 0], m)        # k3
            for i in range(m):
                W[0, i] = X[n, i] + h * W[3, i]
            _matvec(F, &W[0, 0], &W[4, 0], m)        # k4
            bad = False
            for i in range(m):
                X[n + 1, i] = X[n, i] + (h / 6.0) * (
                    W[1, i] + 2.0 * (W[2, i] + W[3, i]) + W[4, i])
                if not isfinite(X[n + 1, i]):
                    bad = True
            if bad:
                with gil:
                    return X_arr, n + 1
    return X_arr, -1
