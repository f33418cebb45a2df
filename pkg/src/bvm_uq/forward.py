"""Forward map G(theta), synthetic observations and the log-likelihood.

The conductivity link is a = exp(theta) + k_min.  The solver convention is
L_a u = sign * f_source, so configurations written against the form
-div(a grad u) = f use sign = -1.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .grids import Grid, GridField
from .solver import SolveConfig, solve_dirichlet

__all__ = [
    "ProblemSpec",
    "Dataset",
    "darcy_poisson_problem",
    "analytic_poisson_solution",
    "conductivity",
    "forward",
    "interpolate",
    "grid_design",
    "uniform_design",
    "observe",
    "log_likelihood",
]

THETA_MAX = 700.0  # exp overflow guard


@dataclass
class ProblemSpec:
    f_source: GridField
    g_boundary: GridField | None
    grid: Grid
    k_min: float = 1e-3
    sign: float = 1.0
    solve_cfg: SolveConfig = field(default_factory=SolveConfig)

    def __post_init__(self):
        if self.k_min < 0.0:
            raise ValueError("k_min must be >= 0")
        if self.sign not in (1.0, -1.0):
            raise ValueError("sign must be +1 or -1")

    def with_cfg(self, cfg: SolveConfig) -> "ProblemSpec":
        return replace(self, solve_cfg=cfg)


@dataclass
class Dataset:
    xs: np.ndarray  # (N, 2) design points
    ys: np.ndarray  # (N,)
    sigma: float

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float).reshape(-1, 2)
        self.ys = np.asarray(self.ys, dtype=float).reshape(-1)
        if self.xs.shape[0] != self.ys.shape[0]:
            raise ValueError("xs and ys lengths differ")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be > 0")
        if np.any(self.xs < 0.0) or np.any(self.xs > 1.0):
            raise DomainError("design points must lie in [0, 1]^2")

    @property
    def N(self) -> int:
        return self.xs.shape[0]

    def to_csv(self, path, sidecar_path=None, *, seed=None, design=None):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "value"])
            for (x, y), v in zip(self.xs, self.ys):
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(v))])
        if sidecar_path is not None:
            meta = {"sigma": self.sigma, "N": self.N, "seed": seed, "design": design}
            with open(sidecar_path, "w") as fh:
                json.dump(meta, fh, indent=2)

    @classmethod
    def from_csv(cls, path, sigma: float) -> "Dataset":
        xs, ys = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                xs.append([float(row["x"]), float(row["y"])])
                ys.append(float(row["value"]))
        return cls(np.array(xs), np.array(ys), sigma)


def darcy_poisson_problem(grid: Grid, *, k_min: float = 0.0,
                          cfg: SolveConfig | None = None) -> ProblemSpec:
    """The reference configuration: -div(a grad u) = -2x(1-x) - 2y(1-y),
    zero boundary data.  At theta = 0, a = 1 the solution is
    u = -xy(1-x)(1-y)."""
    X, Y = grid.meshgrid()
    f = GridField(grid, -2.0 * X * (1.0 - X) - 2.0 * Y * (1.0 - Y))
    return ProblemSpec(
        f_source=f,
        g_boundary=None,
        grid=grid,
        k_min=k_min,
        sign=-1.0,
        solve_cfg=cfg if cfg is not None else SolveConfig(),
    )


def analytic_poisson_solution(grid: Grid) -> GridField:
    X, Y = grid.meshgrid()
    return GridField(grid, -X * Y * (1.0 - X) * (1.0 - Y))


def conductivity(theta: GridField, spec: ProblemSpec) -> GridField:
    """a = exp(theta) + k_min, pointwise."""
    if np.max(theta.values) > THETA_MAX:
        raise DomainError(
            f"theta exceeds exp range: max {np.max(theta.values):.3g} > {THETA_MAX}"
        )
    return GridField(theta.grid, np.exp(theta.values) + spec.k_min)


def forward(theta: GridField, spec: ProblemSpec) -> GridField:
    """Solve L_a u = sign * f with a = conductivity(theta)."""
    a = conductivity(theta, spec)
    f = GridField(spec.grid, spec.sign * spec.f_source.values)
    return solve_dirichlet(a, f, spec.g_boundary, spec.solve_cfg)


class _Interpolator:
    """Precomputed bilinear interpolation weights for a fixed design."""

    def __init__(self, grid: Grid, xs: np.ndarray):
        xs = np.asarray(xs, dtype=float).reshape(-1, 2)
        if np.any(xs < 0.0) or np.any(xs > 1.0):
            raise DomainError("design points must lie in [0, 1]^2")
        m = grid.m
        fx = np.clip(xs[:, 0] * m, 0, m)
        fy = np.clip(xs[:, 1] * m, 0, m)
        ix = np.minimum(fx.astype(int), m - 1)
        iy = np.minimum(fy.astype(int), m - 1)
        tx = fx - ix
        ty = fy - iy
        n = grid.n
        self.idx00 = iy * n + ix
        self.idx01 = iy * n + ix + 1
        self.idx10 = (iy + 1) * n + ix
        self.idx11 = (iy + 1) * n + ix + 1
        self.w00 = (1 - tx) * (1 - ty)
        self.w01 = tx * (1 - ty)
        self.w10 = (1 - tx) * ty
        self.w11 = tx * ty

    def __call__(self, values: np.ndarray) -> np.ndarray:
        v = values.ravel()
        return (self.w00 * v[self.idx00] + self.w01 * v[self.idx01]
                + self.w10 * v[self.idx10] + self.w11 * v[self.idx11])


def interpolate(u: GridField, xs: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of a grid function at arbitrary points."""
    return _Interpolator(u.grid, xs)(u.values)


def grid_design(n_side: int) -> np.ndarray:
    """Equispaced n_side x n_side interior lattice."""
    t = np.arange(1, n_side + 1) / (n_side + 1)
    X, Y = np.meshgrid(t, t, indexing="xy")
    return np.column_stack([X.ravel(), Y.ravel()])


def uniform_design(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 1.0, size=(n, 2))


def observe(u: GridField, design: np.ndarray, sigma: float, seed: int) -> Dataset:
    """y_i = u(x_i) + sigma * eps_i with seeded standard normal noise."""
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    vals = interpolate(u, design)
    rng = np.random.default_rng(seed)
    ys = vals + sigma * rng.standard_normal(vals.shape)
    return Dataset(np.asarray(design, dtype=float), ys, sigma)


def log_likelihood(theta: GridField, data: Dataset, spec: ProblemSpec) -> float:
    """-l_N(theta) with l_N = sum_i (y_i - G(theta)(x_i))^2 / (2 sigma^2)."""
    u = forward(theta, spec)
    resid = data.ys - interpolate(u, data.xs)
    return float(-0.5 * np.dot(resid, resid) / data.sigma**2)
