"""Finite-difference discretization and solve of div(a grad u) = f.

Flux form with arithmetic face averaging: for interior node (i, j),

    (L_a u)_ij = [ a_{i+1/2,j} (u_{i+1,j} - u_{ij})
                 - a_{i-1/2,j} (u_{ij} - u_{i-1,j}) + (same in y) ] / h^2,

with a_{i+1/2,j} the mean of the two adjacent node values.  The interior
operator is symmetric negative definite; the solve runs conjugate
gradients on the sign-flipped system.  Inhomogeneous Dirichlet data is
handled by lifting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CoefficientError, SolverConvergenceError
from .grids import Grid, GridField, _check_same_grid

__all__ = ["SolveConfig", "EllipticOperator", "assemble", "apply_operator", "solve_dirichlet"]


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_iter: int | None = None

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise ValueError(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def resolved_max_iter(self, grid: Grid) -> int:
        return self.max_iter if self.max_iter is not None else 10 * grid.n**2


class EllipticOperator:
    """Assembled flux-form operator: face-averaged coefficient arrays."""

    def __init__(self, grid: Grid, a: GridField, ax: np.ndarray, ay: np.ndarray):
        self.grid = grid
        self.a = a
        self.ax = ax  # (n, n-1): faces between ix and ix+1 on row iy
        self.ay = ay  # (n-1, n): faces between iy and iy+1 on column ix

    def apply(self, u: GridField) -> GridField:
        """L_a u at interior nodes (zero on the boundary ring)."""
        _check_same_grid(u, self.a)
        out = np.zeros_like(u.values)
        kernels.apply_flux(self.ax, self.ay, np.ascontiguousarray(u.values), out,
                           1.0 / self.grid.h**2)
        return GridField(self.grid, out)


def face_coefficients(values: np.ndarray):
    """Arithmetic-mean face averages of a nodal coefficient array."""
    ax = 0.5 * (values[:, :-1] + values[:, 1:])
    ay = 0.5 * (values[:-1, :] + values[1:, :])
    return np.ascontiguousarray(ax), np.ascontiguousarray(ay)


def assemble(a: GridField, *, check_positive: bool = True) -> EllipticOperator:
    """Build the flux-form operator for coefficient field ``a``.

    With ``check_positive`` (the default) a nonpositive coefficient raises
    ``CoefficientError`` naming the offending node.  The score operator
    reuses this assembly with sign-changing coefficients and disables the
    check.
    """
    if check_positive:
        amin_idx = np.unravel_index(np.argmin(a.values), a.values.shape)
        if a.values[amin_idx] <= 0.0:
            iy, ix = amin_idx
            raise CoefficientError(
                f"coefficient is nonpositive at node (ix={ix}, iy={iy}): "
                f"a={a.values[amin_idx]:.3e}",
                node=(int(ix), int(iy)),
            )
    ax, ay = face_coefficients(a.values)
    return EllipticOperator(a.grid, a, ax, ay)


def apply_operator(a: GridField, u: GridField) -> GridField:
    return assemble(a).apply(u)


def solve_dirichlet(
    a: GridField,
    f: GridField,
    g_boundary: GridField | None = None,
    cfg: SolveConfig = SolveConfig(),
    *,
    operator: EllipticOperator | None = None,
) -> GridField:
    """Solve L_a u = f at interior nodes with u = g on the boundary.

    ``operator`` may carry a pre-assembled operator for ``a`` to skip
    re-assembly in hot loops.
    """
    op = operator if operator is not None else assemble(a)
    grid = op.grid
    _check_same_grid(a, f)
    inv_h2 = 1.0 / grid.h**2

    # Lifting: write u = w + ghat where ghat equals g on the boundary ring
    # and vanishes inside; then -L w = -(f - L ghat) with w = 0 on boundary.
    b = -np.ascontiguousarray(f.values.copy())
    if g_boundary is not None:
        _check_same_grid(a, g_boundary)
        ghat = np.zeros_like(b)
        ghat[0, :] = g_boundary.values[0, :]
        ghat[-1, :] = g_boundary.values[-1, :]
        ghat[:, 0] = g_boundary.values[:, 0]
        ghat[:, -1] = g_boundary.values[:, -1]
        lg = np.zeros_like(b)
        kernels.apply_flux(op.ax, op.ay, ghat, lg, inv_h2)
        b += lg
    b[0, :] = b[-1, :] = b[:, 0] = b[:, -1] = 0.0

    x = np.zeros_like(b)
    iters, relres = kernels.cg_flux(
        op.ax, op.ay, b, x, inv_h2, cfg.tol, cfg.resolved_max_iter(grid)
    )
    if relres > cfg.tol:
        raise SolverConvergenceError(
            f"CG did not converge: relative residual {relres:.3e} after "
            f"{iters} iterations (tol {cfg.tol:.1e})",
            residual=relres,
            iterations=iters,
        )
    if g_boundary is not None:
        x[0, :] = g_boundary.values[0, :]
        x[-1, :] = g_boundary.values[-1, :]
        x[:, 0] = g_boundary.values[:, 0]
        x[:, -1] = g_boundary.values[:, -1]
    return GridField(grid, x)
