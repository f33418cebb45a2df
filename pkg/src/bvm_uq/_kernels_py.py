"""Pure-numpy fallback for the stencil kernels.

Mirrors the contracts of the compiled ``_kernels`` extension exactly;
``kernels`` picks whichever is available at import time.
"""

import numpy as np


def _flux_interior(ax, ay, u, inv_h2):
    """(div a grad u) at interior nodes, shape (n-2, n-2)."""
    return inv_h2 * (
        ax[1:-1, 1:] * (u[1:-1, 2:] - u[1:-1, 1:-1])
        - ax[1:-1, :-1] * (u[1:-1, 1:-1] - u[1:-1, :-2])
        + ay[1:, 1:-1] * (u[2:, 1:-1] - u[1:-1, 1:-1])
        - ay[:-1, 1:-1] * (u[1:-1, 1:-1] - u[:-2, 1:-1])
    )


def apply_flux(ax, ay, u, out, inv_h2):
    out[1:-1, 1:-1] = _flux_interior(ax, ay, u, inv_h2)


def cg_flux(ax, ay, b, x, inv_h2, tol, maxiter):
    """CG on A x = b, A = -(div a grad) on interior nodes, zero boundary.

    ``x`` holds the initial guess and is overwritten; returns
    (iterations, relative_residual).
    """
    bi = b[1:-1, 1:-1]
    bnorm = np.linalg.norm(bi)
    if bnorm == 0.0:
        x[...] = 0.0
        return 0, 0.0

    n = b.shape[0]
    r = bi + _flux_interior(ax, ay, x, inv_h2)
    rz = float(np.dot(r.ravel(), r.ravel()))
    relres = np.sqrt(rz) / bnorm
    if relres <= tol:
        return 0, float(relres)

    p = np.zeros((n, n))
    p[1:-1, 1:-1] = r
    for it in range(1, maxiter + 1):
        ap = -_flux_interior(ax, ay, p, inv_h2)
        pap = float(np.dot(p[1:-1, 1:-1].ravel(), ap.ravel()))
        alpha = rz / pap
        x[1:-1, 1:-1] += alpha * p[1:-1, 1:-1]
        r -= alpha * ap
        rz_new = float(np.dot(r.ravel(), r.ravel()))
        relres = np.sqrt(rz_new) / bnorm
        if relres <= tol:
            return it, float(relres)
        p[1:-1, 1:-1] = r + (rz_new / rz) * p[1:-1, 1:-1]
        rz = rz_new
    return maxiter, float(relres)
