import numpy as np
import pytest

import bvm_uq as b


@pytest.fixture(scope="session")
def grid64():
    return b.Grid(64)


@pytest.fixture(scope="session")
def problem64(grid64):
    return b.darcy_poisson_problem(grid64)


@pytest.fixture(scope="session")
def theta0_64(grid64):
    return b.GridField(grid64, np.zeros((grid64.n, grid64.n)))


@pytest.fixture(scope="session")
def u_true64(theta0_64, problem64):
    return b.forward(theta0_64, problem64)


@pytest.fixture(scope="session")
def lp64(theta0_64, problem64):
    return b.LinearizationPoint(theta0_64, problem64)


@pytest.fixture(scope="session")
def ig8(lp64):
    return b.build_info_gram(lp64, 8)


@pytest.fixture(scope="session")
def psi8(grid64):
    return b.bump_psi_coeffs(grid64, 8)


def smooth_field(grid, seed, modes=4):
    """Random band-limited field: a few low sine modes with O(1) coefficients."""
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((modes, modes))
    sv = b.SpectralVector(modes, coeffs.ravel())
    return b.synthesize(sv, grid)
