"""Linearization of the forward map: score operator, adjoint, remainder.

The derivative of G at theta0 acts on a direction h as

    score(h) = -L_{a0}^{-1}[ div( e^{theta0} h grad u0 ) ],

with a0 = conductivity(theta0) and u0 = G(theta0).  The divergence term is
discretized with the same flux stencil as the main operator, and the
adjoint uses the flux-consistent gradient product (half-sum of face
difference products), which makes the discrete adjoint identity

    <score(h), g> = <h, score_adjoint(g)>

exact up to solver tolerance rather than up to O(h^2) gradient error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forward import ProblemSpec, conductivity, forward
from .grids import GridField
from .solver import EllipticOperator, assemble, face_coefficients, solve_dirichlet

__all__ = ["LinearizationPoint", "apply_score", "apply_score_adjoint", "remainder"]


@dataclass
class LinearizationPoint:
    """theta0 with its derived fields; a0 and u0 are always recomputed."""

    theta0: GridField
    spec: ProblemSpec

    def __post_init__(self):
        self.a0 = conductivity(self.theta0, self.spec)
        self.u0 = forward(self.theta0, self.spec)
        self.op0: EllipticOperator = assemble(self.a0)
        self.exp_theta0 = np.exp(self.theta0.values)
        # face differences of u0, reused by the adjoint product
        self._du0x = self.u0.values[:, 1:] - self.u0.values[:, :-1]
        self._du0y = self.u0.values[1:, :] - self.u0.values[:-1, :]

    @property
    def grid(self):
        return self.spec.grid


def _divergence_term(lp: LinearizationPoint, h: GridField) -> np.ndarray:
    """div( e^{theta0} h grad u0 ) at interior nodes via the flux stencil.

    The coefficient e^{theta0} h may change sign; assembly positivity
    checks do not apply here.
    """
    c = lp.exp_theta0 * h.values
    cx, cy = face_coefficients(c)
    inv_h2 = 1.0 / lp.grid.h**2
    u = lp.u0.values
    out = np.zeros_like(u)
    out[1:-1, 1:-1] = inv_h2 * (
        cx[1:-1, 1:] * (u[1:-1, 2:] - u[1:-1, 1:-1])
        - cx[1:-1, :-1] * (u[1:-1, 1:-1] - u[1:-1, :-2])
        + cy[1:, 1:-1] * (u[2:, 1:-1] - u[1:-1, 1:-1])
        - cy[:-1, 1:-1] * (u[1:-1, 1:-1] - u[:-2, 1:-1])
    )
    return out


def apply_score(h: GridField, lp: LinearizationPoint) -> GridField:
    """score(h) = -L_{a0}^{-1}[div(e^{theta0} h grad u0)], zero boundary."""
    v = GridField(lp.grid, _divergence_term(lp, h))
    z = solve_dirichlet(lp.a0, v, None, lp.spec.solve_cfg, operator=lp.op0)
    return GridField(lp.grid, -z.values)


def apply_score_adjoint(g: GridField, lp: LinearizationPoint) -> GridField:
    """score*(g) = e^{theta0} grad(u0) . grad(L_{a0}^{-1} g).

    The gradient product is the half-sum of face-difference products
    divided by the node quadrature weight, the exact discrete adjoint of
    ``apply_score`` under the trapezoid inner product.
    """
    w = solve_dirichlet(lp.a0, g, None, lp.spec.solve_cfg, operator=lp.op0)
    dwx = w.values[:, 1:] - w.values[:, :-1]
    dwy = w.values[1:, :] - w.values[:-1, :]
    px = lp._du0x * dwx  # (n, n-1)
    py = lp._du0y * dwy  # (n-1, n)
    z = np.zeros_like(w.values)
    z[:, :-1] += px
    z[:, 1:] += px
    z[:-1, :] += py
    z[1:, :] += py
    grid = lp.grid
    z *= 0.5 / (grid.h**2 * grid.quad_weights)
    return GridField(grid, lp.exp_theta0 * z)


def remainder(h: GridField, lp: LinearizationPoint) -> GridField:
    """R(h) = G(theta0 + h) - G(theta0) - score(h)."""
    theta = GridField(lp.grid, lp.theta0.values + h.values)
    g1 = forward(theta, lp.spec)
    lin = apply_score(h, lp)
    return GridField(lp.grid, g1.values - lp.u0.values - lin.values)
