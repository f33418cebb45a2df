"""Uniform grids on the unit square, grid functions and the sine eigenbasis.

Conventions fixed here and shared by every other module:

* nodes are the (m+1) x (m+1) lattice ``(ix/m, iy/m)``, stored as 2-D arrays
  indexed ``[iy, ix]`` (row-major flattening gives node index
  ``iy*(m+1) + ix``);
* the L2 inner product is composite-trapezoid quadrature (boundary nodes
  carry weight 1/2 per direction);
* the basis functions are ``e_{jk}(x, y) = 2 sin(j pi x) sin(k pi y)``,
  and spectral coefficients are stored flat with index ``(j-1)*J + (k-1)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AliasingError, GridMismatchError

__all__ = [
    "Grid",
    "GridField",
    "SpectralVector",
    "inner_product",
    "l2_norm",
    "synthesize",
    "analyze",
    "eval_bump_psi",
    "bump_psi_coeffs",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``m`` cells per side on [0, 1]^2."""

    m: int

    def __post_init__(self):
        if self.m < 4:
            raise ValueError(f"grid needs m >= 4 cells per side, got m={self.m}")

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def n(self) -> int:
        """Nodes per side."""
        return self.m + 1

    @property
    def coords(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.m + 1)

    def meshgrid(self):
        """(X, Y) arrays indexed [iy, ix]."""
        c = self.coords
        return np.meshgrid(c, c, indexing="xy")

    @property
    def quad_weights(self) -> np.ndarray:
        """Trapezoid weights per node, shape (n, n)."""
        w = np.ones(self.n)
        w[0] = w[-1] = 0.5
        return np.outer(w, w)


@dataclass
class GridField:
    """Real values on the nodes of a grid, indexed [iy, ix]."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.grid.n
        if self.values.shape == (n * n,):
            self.values = self.values.reshape(n, n)
        if self.values.shape != (n, n):
            raise GridMismatchError(
                f"field shape {self.values.shape} does not match grid ({n}x{n})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def copy(self) -> "GridField":
        return GridField(self.grid, self.values.copy())

    def __add__(self, other: "GridField") -> "GridField":
        _check_same_grid(self, other)
        return GridField(self.grid, self.values + other.values)

    def __sub__(self, other: "GridField") -> "GridField":
        _check_same_grid(self, other)
        return GridField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridField":
        return GridField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ix", "iy", "value"])
            n = self.grid.n
            for iy in range(n):
                for ix in range(n):
                    writer.writerow([ix, iy, repr(float(self.values[iy, ix]))])

    @classmethod
    def from_csv(cls, path, grid: Grid) -> "GridField":
        values = np.zeros((grid.n, grid.n))
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                values[int(row["iy"]), int(row["ix"])] = float(row["value"])
        return cls(grid, values)


@dataclass
class SpectralVector:
    """Coefficients in the truncated sine eigenbasis, flat (j, k) order."""

    J: int
    coeffs: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.coeffs is None:
            self.coeffs = np.zeros(self.J * self.J)
        self.coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if self.coeffs.shape != (self.J * self.J,):
            raise ValueError(
                f"expected {self.J * self.J} coefficients, got {self.coeffs.size}"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("spectral coefficients contain non-finite values")

    def as_matrix(self) -> np.ndarray:
        """Coefficients as a (J, J) array indexed [j-1, k-1]."""
        return self.coeffs.reshape(self.J, self.J)

    def copy(self) -> "SpectralVector":
        return SpectralVector(self.J, self.coeffs.copy())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "k", "coeff"])
            C = self.as_matrix()
            for j in range(1, self.J + 1):
                for k in range(1, self.J + 1):
                    writer.writerow([j, k, repr(float(C[j - 1, k - 1]))])

    @classmethod
    def from_csv(cls, path, J: int) -> "SpectralVector":
        C = np.zeros((J, J))
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                C[int(row["j"]) - 1, int(row["k"]) - 1] = float(row["coeff"])
        return cls(J, C.reshape(-1))


def _check_same_grid(f: GridField, g: GridField):
    if f.grid.m != g.grid.m:
        raise GridMismatchError(f"grids differ: m={f.grid.m} vs m={g.grid.m}")


def inner_product(f: GridField, g: GridField) -> float:
    """Trapezoid-quadrature L2 inner product over the unit square."""
    _check_same_grid(f, g)
    h = f.grid.h
    return float(h * h * np.sum(f.grid.quad_weights * f.values * g.values))


def l2_norm(f: GridField) -> float:
    return float(np.sqrt(max(inner_product(f, f), 0.0)))


@lru_cache(maxsize=16)
def _sine_table(m: int, J: int) -> np.ndarray:
    """S[j-1, i] = sin(j pi x_i) for the (m+1)-node coordinate line."""
    x = np.linspace(0.0, 1.0, m + 1)
    j = np.arange(1, J + 1)
    return np.sin(np.pi * np.outer(j, x))


def synthesize(v: SpectralVector, grid: Grid) -> GridField:
    """Evaluate sum_{j,k <= J} v_{jk} e_{jk} at the grid nodes."""
    if v.J > grid.m:
        raise AliasingError(f"truncation J={v.J} exceeds grid m={grid.m}")
    S = _sine_table(grid.m, v.J)
    C = v.as_matrix()
    # values[iy, ix] = 2 sum_{jk} C[j,k] sin(j pi x_ix) sin(k pi y_iy)
    values = 2.0 * np.einsum("ky,jk,jx->yx", S, C, S)
    return GridField(grid, values)


def analyze(f: GridField, J: int) -> SpectralVector:
    """Quadrature projections <f, e_{jk}> for j, k <= J."""
    grid = f.grid
    if J > grid.m:
        raise AliasingError(f"truncation J={J} exceeds grid m={grid.m}")
    S = _sine_table(grid.m, J)
    R = grid.quad_weights * f.values
    C = 2.0 * grid.h**2 * np.einsum("jx,yx,ky->jk", S, R, S)
    return SpectralVector(J, C.reshape(-1))


def eval_bump_psi(grid: Grid) -> GridField:
    """Smooth compactly supported bump on (3/8, 5/8) x (1/5, 3/5).

    psi(x, y) = exp(-[1/((8x-3)(5-8x)) + 1/((5y-1)(3-5y))]) inside the open
    support rectangle and exactly 0 elsewhere (limit value at the boundary).
    """
    X, Y = grid.meshgrid()
    px = (8.0 * X - 3.0) * (5.0 - 8.0 * X)
    py = (5.0 * Y - 1.0) * (3.0 - 5.0 * Y)
    inside = (px > 0.0) & (py > 0.0)
    expo = np.full_like(X, -np.inf)
    np.divide(-1.0, px, out=px, where=inside)
    np.divide(-1.0, py, out=py, where=inside)
    expo = np.where(inside, px + py, -np.inf)
    values = np.zeros_like(X)
    ok = inside & (expo > -700.0)
    values[ok] = np.exp(expo[ok])
    return GridField(grid, values)


def bump_psi_coeffs(grid: Grid, J: int) -> SpectralVector:
    """Spectral projection of the bump functional at truncation J."""
    return analyze(eval_bump_psi(grid), J)
