import numpy as np
import pytest

import bvm_uq as b
from bvm_uq.solver import SolveConfig, face_coefficients


def _manufactured(grid):
    """Non-polynomial manufactured problem: u = sin(pi x) sin(pi y) with
    a = 1, so -div(a grad u) = 2 pi^2 u."""
    X, Y = grid.meshgrid()
    u = np.sin(np.pi * X) * np.sin(np.pi * Y)
    f = -2.0 * np.pi**2 * u  # L u = f with L = div(a grad), a = 1
    return b.GridField(grid, u), b.GridField(grid, f)


def _solve_manufactured(m):
    grid = b.Grid(m)
    u_exact, f = _manufactured(grid)
    a = b.GridField(grid, np.ones((grid.n, grid.n)))
    g0 = b.GridField(grid, np.zeros((grid.n, grid.n)))
    u = b.solve_dirichlet(a, f, g0)
    return float(np.max(np.abs(u.values - u_exact.values)))


def test_second_order_convergence():
    # The genuine discretization-error ratio between successive grids is ~4
    # for a solution outside the polynomial kernel of the stencil.
    e32 = _solve_manufactured(32)
    e64 = _solve_manufactured(64)
    assert e32 / e64 == pytest.approx(4.0, rel=0.1)


def test_face_coefficients_are_means():
    grid = b.Grid(8)
    a = b.GridField(grid, np.arange(grid.n * grid.n, dtype=float).reshape(grid.n, grid.n) + 1.0)
    ax, ay = face_coefficients(a.values)
    assert ax.shape == (grid.n, grid.n - 1)
    assert ay.shape == (grid.n - 1, grid.n)
    assert ax[0, 0] == pytest.approx(0.5 * (a.values[0, 0] + a.values[0, 1]))
    assert ay[0, 0] == pytest.approx(0.5 * (a.values[0, 0] + a.values[1, 0]))


def test_assemble_rejects_nonpositive_coefficient():
    grid = b.Grid(8)
    vals = np.ones((grid.n, grid.n))
    vals[4, 5] = -1.0
    with pytest.raises(b.CoefficientError) as err:
        b.assemble(b.GridField(grid, vals))
    assert err.value.node is not None


def test_solver_convergence_error_carries_residual():
    grid = b.Grid(32)
    _, f = _manufactured(grid)
    a = b.GridField(grid, np.ones((grid.n, grid.n)))
    g0 = b.GridField(grid, np.zeros((grid.n, grid.n)))
    with pytest.raises(b.SolverConvergenceError) as err:
        b.solve_dirichlet(a, f, g0, cfg=SolveConfig(tol=1e-14, max_iter=2))
    assert err.value.residual > 0.0
    assert err.value.iterations == 2


def test_dirichlet_boundary_values_respected():
    grid = b.Grid(16)
    a = b.GridField(grid, np.ones((grid.n, grid.n)))
    f = b.GridField(grid, np.zeros((grid.n, grid.n)))
    X, Y = grid.meshgrid()
    gb = b.GridField(grid, X + Y)  # harmonic, so u = g everywhere
    u = b.solve_dirichlet(a, f, gb)
    np.testing.assert_allclose(u.values, gb.values, atol=1e-9)


def test_operator_is_symmetric_on_interior():
    grid = b.Grid(8)
    rng = np.random.default_rng(5)
    a = b.GridField(grid, np.exp(0.3 * rng.standard_normal((grid.n, grid.n))))
    op = b.assemble(a)
    n = grid.n

    def pad_interior(v):
        w = np.zeros((n, n))
        w[1:-1, 1:-1] = v.reshape(n - 2, n - 2)
        return b.GridField(grid, w)

    k = (n - 2) ** 2
    rng2 = np.random.default_rng(6)
    for _ in range(5):
        x = rng2.standard_normal(k)
        y = rng2.standard_normal(k)
        Ax = op.apply(pad_interior(x)).values[1:-1, 1:-1].ravel()
        Ay = op.apply(pad_interior(y)).values[1:-1, 1:-1].ravel()
        assert np.dot(y, Ax) == pytest.approx(np.dot(x, Ay), rel=1e-12, abs=1e-12)
