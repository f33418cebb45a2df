# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernels: flux-form 5-point apply and a CG solve.

Same contracts as the numpy fallback in ``_kernels_py``; ``kernels``
selects one implementation at import time.
"""

from libc.math cimport sqrt

import numpy as np


def apply_flux(double[:, ::1] ax, double[:, ::1] ay, double[:, ::1] u,
               double[:, ::1] out, double inv_h2):
    """out[interior] = (div a grad u)[interior]; boundary rows untouched."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            v = ax[i, j] * (u[i, j + 1] - u[i, j]) \
                - ax[i, j - 1] * (u[i, j] - u[i, j - 1]) \
                + ay[i, j] * (u[i + 1, j] - u[i, j]) \
                - ay[i - 1, j] * (u[i, j] - u[i - 1, j])
            out[i, j] = v * inv_h2


def cg_flux(double[:, ::1] ax, double[:, ::1] ay, double[:, ::1] b,
            double[:, ::1] x, double inv_h2, double tol, int maxiter):
    """Conjugate gradients on A x = b with A = -(div a grad) on interior
    nodes and zero Dirichlet boundary.

    ``x`` is the initial guess and is overwritten with the solution; its
    boundary ring must be zero.  Returns (iterations, relative_residual).
    """
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i, j, it
    cdef double bnorm2 = 0.0, rz, rz_new, alpha, beta, pap, v, relres

    r_arr = np.zeros((n, n))
    p_arr = np.zeros((n, n))
    ap_arr = np.zeros((n, n))
    cdef double[:, ::1] r = r_arr
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] ap = ap_arr

    for i in range(1, n - 1):
        for j in range(1, n - 1):
            bnorm2 += b[i, j] * b[i, j]
    if bnorm2 == 0.0:
        for i in range(n):
            for j in range(n):
                x[i, j] = 0.0
        return 0, 0.0

    # r = b - A x  (A = -flux apply)
    rz = 0.0
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            v = ax[i, j] * (x[i, j + 1] - x[i, j]) \
                - ax[i, j - 1] * (x[i, j] - x[i, j - 1]) \
                + ay[i, j] * (x[i + 1, j] - x[i, j]) \
                - ay[i - 1, j] * (x[i, j] - x[i - 1, j])
            r[i, j] = b[i, j] + v * inv_h2
            p[i, j] = r[i, j]
            rz += r[i, j] * r[i, j]

    relres = sqrt(rz / bnorm2)
    if relres <= tol:
        return 0, relres

    for it in range(1, maxiter + 1):
        pap = 0.0
        for i in range(1, n - 1):
            for j in range(1, n - 1):
                v = ax[i, j] * (p[i, j + 1] - p[i, j]) \
                    - ax[i, j - 1] * (p[i, j] - p[i, j - 1]) \
                    + ay[i, j] * (p[i + 1, j] - p[i, j]) \
                    - ay[i - 1, j] * (p[i, j] - p[i - 1, j])
                ap[i, j] = -v * inv_h2
                pap += p[i, j] * ap[i, j]
        alpha = rz / pap
        rz_new = 0.0
        for i in range(1, n - 1):
            for j in range(1, n - 1):
                x[i, j] += alpha * p[i, j]
                r[i, j] -= alpha * ap[i, j]
                rz_new += r[i, j] * r[i, j]
        relres = sqrt(rz_new / bnorm2)
        if relres <= tol:
            return it, relres
        beta = rz_new / rz
        rz = rz_new
        for i in range(1, n - 1):
            for j in range(1, n - 1):
                p[i, j] = r[i, j] + beta * p[i, j]
    return maxiter, relres
