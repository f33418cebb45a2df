import numpy as np
import pytest

import bvm_uq as b
from bvm_uq.grids import _sine_table


def test_grid_rejects_tiny_m():
    with pytest.raises(ValueError):
        b.Grid(3)


def test_grid_geometry():
    g = b.Grid(8)
    assert g.h == pytest.approx(1.0 / 8)
    assert g.n == 9
    assert g.coords[0] == 0.0 and g.coords[-1] == 1.0


def test_quad_weights_integrate_constant():
    g = b.Grid(16)
    one = b.GridField(g, np.ones((g.n, g.n)))
    assert b.inner_product(one, one) == pytest.approx(1.0)


def test_basis_orthonormal_under_quadrature():
    # Trapezoid quadrature is exact for products of sine modes below the
    # Nyquist index, so the discrete Gram of the basis is the identity.
    g = b.Grid(32)
    J = 6
    fields = []
    for j in range(1, J + 1):
        for k in range(1, J + 1):
            v = b.SpectralVector(J)
            v.coeffs[(j - 1) * J + (k - 1)] = 1.0
            fields.append(b.synthesize(v, g))
    gram = np.array([[b.inner_product(f, h) for h in fields] for f in fields])
    assert np.max(np.abs(gram - np.eye(J * J))) < 1e-12


def test_analyze_synthesize_roundtrip():
    g = b.Grid(32)
    rng = np.random.default_rng(3)
    v = b.SpectralVector(5, rng.standard_normal(25))
    back = b.analyze(b.synthesize(v, g), 5)
    np.testing.assert_allclose(back.coeffs, v.coeffs, atol=1e-12)


def test_synthesize_matches_closed_form():
    g = b.Grid(16)
    v = b.SpectralVector(3)
    v.coeffs[0 * 3 + 1] = 1.0  # mode (j, k) = (1, 2)
    f = b.synthesize(v, g)
    X, Y = g.meshgrid()
    expected = 2.0 * np.sin(np.pi * X) * np.sin(2 * np.pi * Y)
    np.testing.assert_allclose(f.values, expected, atol=1e-13)


def test_inner_product_grid_mismatch():
    f = b.GridField(b.Grid(8), np.zeros((9, 9)))
    g = b.GridField(b.Grid(16), np.zeros((17, 17)))
    with pytest.raises(b.GridMismatchError):
        b.inner_product(f, g)


def test_sine_table_cached_shape():
    S = _sine_table(16, 4)
    assert S.shape == (4, 17)
    assert S[0, 0] == 0.0 and S[0, -1] == pytest.approx(0.0, abs=1e-15)


def test_bump_value_at_interior_point():
    # psi(1/2, 2/5) = exp(-(1/1 + 1/1)) = e^{-2} at the center of the bump.
    g = b.Grid(40)
    f = b.eval_bump_psi(g)
    iy = 16  # y = 0.4
    ix = 20  # x = 0.5
    assert f.values[iy, ix] == pytest.approx(np.exp(-2.0), rel=1e-12)


def test_bump_vanishes_outside_support():
    g = b.Grid(64)
    f = b.eval_bump_psi(g)
    X, Y = g.meshgrid()
    outside = (X <= 3 / 8) | (X >= 5 / 8) | (Y <= 1 / 5) | (Y >= 3 / 5)
    assert np.all(f.values[outside] == 0.0)


def test_bump_coeffs_reconstruct_functional():
    # <psi, theta> computed in the spectral domain agrees with quadrature for
    # a band-limited theta.
    g = b.Grid(64)
    J = 8
    psi = b.bump_psi_coeffs(g, J)
    rng = np.random.default_rng(11)
    theta = b.SpectralVector(J, rng.standard_normal(J * J))
    spectral = float(np.dot(psi.coeffs, theta.coeffs))
    quadrature = b.inner_product(b.eval_bump_psi(g), b.synthesize(theta, g))
    assert spectral == pytest.approx(quadrature, rel=1e-12)


def test_grid_field_csv_roundtrip(tmp_path):
    g = b.Grid(8)
    rng = np.random.default_rng(0)
    f = b.GridField(g, rng.standard_normal((g.n, g.n)))
    path = tmp_path / "field.csv"
    f.to_csv(path)
    back = b.GridField.from_csv(path, g)
    np.testing.assert_array_equal(back.values, f.values)


def test_spectral_vector_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    v = b.SpectralVector(4, rng.standard_normal(16))
    path = tmp_path / "vec.csv"
    v.to_csv(path)
    back = b.SpectralVector.from_csv(path, 4)
    np.testing.assert_array_equal(back.coeffs, v.coeffs)


def test_spectral_vector_rejects_nan():
    with pytest.raises(ValueError):
        b.SpectralVector(2, [1.0, np.nan, 0.0, 0.0])
