"""Galerkin computation of the asymptotic interval quantities.

Everything here lives in the truncated sine basis: the information Gram
G[p, q] = <score(e_p), score(e_q)>, the perturbation vector solving
(N G + tau^{-2} diag(lambda^alpha)) c = psi, the scales s_N and t_N, the
bias term, the spectral distribution function of the prior-whitened
information operator, its distance function, and the closed-form coverage
condition checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import BvmUqError, DomainError
from .grids import SpectralVector
from .prior import eigenvalues
from .score import LinearizationPoint, apply_score

__all__ = [
    "InfoGram",
    "AsymptoticReport",
    "build_info_gram",
    "perturbation",
    "scale_s",
    "scale_t",
    "bias_b",
    "spectral_distribution",
    "distance_function",
    "rate_fit",
    "check_coverage_conditions",
    "asymptotic_report",
]

CONDITION_WARN_LIMIT = 1e14


@dataclass
class InfoGram:
    """Information Gram matrix in the truncated basis plus its columns."""

    J: int
    B_cols: np.ndarray  # (J^2, n, n): score images of the basis fields
    G_info: np.ndarray  # (J^2, J^2)
    symmetry_defect: float = 0.0
    lambdas: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.lambdas is None:
            self.lambdas = eigenvalues(self.J)

    def whitened(self, alpha: float) -> np.ndarray:
        """M = D^{-alpha/2} G D^{-alpha/2}, the prior-whitened information."""
        half = self.lambdas ** (-alpha / 2.0)
        return half[:, None] * self.G_info * half[None, :]


@dataclass
class AsymptoticReport:
    N: int
    alpha: float
    beta: float
    tau: float
    s_N: float
    t_N: float
    b_N: float
    psi_bar: SpectralVector
    ratio_t_over_s: float
    conditions: dict
    condition_number: float = float("nan")

    def __post_init__(self):
        if not (0.0 <= self.t_N < self.s_N):
            raise BvmUqError(
                f"expected 0 <= t_N < s_N, got t_N={self.t_N}, s_N={self.s_N}"
            )

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alpha": self.alpha,
            "beta": self.beta,
            "tau": self.tau,
            "s_N": self.s_N,
            "t_N": self.t_N,
            "b_N": self.b_N,
            "ratio_t_over_s": self.ratio_t_over_s,
            "condition_number": self.condition_number,
            "conditions": self.conditions,
            "psi_bar": self.psi_bar.coeffs.tolist(),
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


def build_info_gram(lp: LinearizationPoint, J: int) -> InfoGram:
    """J^2 score solves over the basis fields and their pairwise Gram."""
    grid = lp.grid
    if J > grid.m // 2:
        raise ValueError(f"J={J} exceeds m/2={grid.m // 2} (aliasing risk)")
    from .prior import eigenpair

    n = grid.n
    cols = np.empty((J * J, n, n))
    for j in range(1, J + 1):
        for k in range(1, J + 1):
            _, e = eigenpair(j, k, grid)
            try:
                cols[(j - 1) * J + (k - 1)] = apply_score(e, lp).values
            except BvmUqError as exc:
                raise BvmUqError(f"score solve failed for basis mode ({j},{k})") from exc
    w = grid.quad_weights * grid.h**2
    flat = cols.reshape(J * J, -1)
    G = flat @ (cols * w).reshape(J * J, -1).T
    defect = float(np.max(np.abs(G - G.T)) / max(np.max(np.abs(G)), 1e-300))
    G = 0.5 * (G + G.T)
    return InfoGram(J=J, B_cols=cols, G_info=G, symmetry_defect=defect)


def _system_matrix(ig: InfoGram, N: int, tau: float, alpha: float) -> np.ndarray:
    return N * ig.G_info + np.diag(ig.lambdas**alpha) / tau**2


def perturbation(psi: SpectralVector, ig: InfoGram, N: int, tau: float,
                 alpha: float) -> SpectralVector:
    """Solve (N G + tau^{-2} Lambda^alpha) c = psi for the perturbation c."""
    if psi.J != ig.J:
        raise ValueError("psi truncation does not match the Gram")
    A = _system_matrix(ig, N, tau, alpha)
    c, low = scipy.linalg.cho_factor(A)
    sol = scipy.linalg.cho_solve((c, low), psi.coeffs)
    return SpectralVector(ig.J, sol)


def system_condition(ig: InfoGram, N: int, tau: float, alpha: float) -> float:
    return float(np.linalg.cond(_system_matrix(ig, N, tau, alpha)))


def scale_s(psi: SpectralVector, ig: InfoGram, N: int, tau: float,
            alpha: float) -> float:
    """s_N = sqrt(<psi, c>) with c the perturbation vector."""
    c = perturbation(psi, ig, N, tau, alpha)
    val = float(np.dot(psi.coeffs, c.coeffs))
    if val < 0.0:
        raise BvmUqError(f"posterior-scale inner product is negative: {val}")
    return float(np.sqrt(val))


def scale_t(psi_bar: SpectralVector, ig: InfoGram, N: int) -> float:
    """t_N = sqrt(N * psi_bar^T G psi_bar)."""
    if psi_bar.J != ig.J:
        raise ValueError("psi_bar truncation does not match the Gram")
    val = N * float(psi_bar.coeffs @ ig.G_info @ psi_bar.coeffs)
    return float(np.sqrt(max(val, 0.0)))


def bias_b(theta0: SpectralVector, psi_bar: SpectralVector, tau: float,
           alpha: float) -> float:
    """b_N = tau^{-2} sum lambda^alpha theta0 c."""
    if theta0.J != psi_bar.J:
        raise ValueError("coefficient vectors have different truncations")
    lam = eigenvalues(theta0.J)
    return float(np.sum(lam**alpha * theta0.coeffs * psi_bar.coeffs) / tau**2)


def _whitened_decomposition(psi: SpectralVector, ig: InfoGram, alpha: float):
    """Eigendecomposition of M plus psi_lambda in eigen coordinates."""
    M = ig.whitened(alpha)
    mu, V = np.linalg.eigh(M)
    mu = np.clip(mu, 0.0, None)
    psi_lam = ig.lambdas ** (-alpha / 2.0) * psi.coeffs
    p = V.T @ psi_lam
    return mu, p


def spectral_distribution(psi: SpectralVector, ig: InfoGram, alpha: float,
                          t: float) -> float:
    """F(t) = norm of the spectral projection of psi_lambda onto
    eigenvalues of M = D^{-a/2} G D^{-a/2} not exceeding t."""
    if t <= 0.0:
        raise DomainError("spectral threshold t must be > 0")
    mu, p = _whitened_decomposition(psi, ig, alpha)
    return float(np.sqrt(np.sum(p[mu <= t] ** 2)))


def distance_function(psi: SpectralVector, ig: InfoGram, alpha: float,
                      R: float) -> float:
    """d_{1/2}(R) = min over ||v|| <= R of ||psi_lambda - M^{1/2} v||.

    Solved through the eigendecomposition of M and a monotone root find on
    the Lagrange multiplier of the norm constraint.
    """
    if R < 0.0:
        raise DomainError("radius R must be >= 0")
    mu, p = _whitened_decomposition(psi, ig, alpha)
    psi_norm = float(np.sqrt(np.sum(p**2)))
    if R == 0.0 or psi_norm == 0.0:
        return psi_norm

    pos = mu > 0.0
    # Unconstrained minimizer v = p / sqrt(mu) on positive modes; if it fits
    # in the ball the distance is the null-space residual.
    norm_unconstrained = np.sqrt(np.sum(p[pos] ** 2 / mu[pos])) if np.any(pos) else 0.0
    if norm_unconstrained <= R:
        return float(np.sqrt(np.sum(p[~pos] ** 2)))

    def constraint(nu: float) -> float:
        return float(np.sum(mu[pos] * p[pos] ** 2 / (mu[pos] + nu) ** 2)) - R * R

    mu_max = float(mu.max())
    lo = mu_max * 1e-300
    hi = mu_max
    # constraint(nu) is strictly decreasing; expand until a sign change.
    for _ in range(2000):
        if constraint(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise BvmUqError(f"multiplier bracket expansion failed: [{lo}, {hi}]")
    for _ in range(2000):
        if constraint(lo) > 0.0:
            break
        lo *= 0.5
        if lo == 0.0:
            raise BvmUqError("multiplier bracket collapsed at zero")
    nu = brentq(constraint, lo, hi, rtol=1e-14, maxiter=500)
    d2 = np.sum(p[pos] ** 2 * nu**2 / (mu[pos] + nu) ** 2) + np.sum(p[~pos] ** 2)
    return float(np.sqrt(d2))


def rate_fit(xs) -> tuple[float, float]:
    """Least-squares slope of log(value) against log(N), with its stderr."""
    pts = list(xs)
    if len(pts) < 3:
        raise DomainError("need at least 3 points for a rate fit")
    ns = np.array([p[0] for p in pts], dtype=float)
    vals = np.array([p[1] for p in pts], dtype=float)
    if np.any(ns <= 0.0) or np.any(vals <= 0.0):
        raise DomainError("rate fit requires positive N and values")
    X = np.log(ns)
    Y = np.log(vals)
    A = np.column_stack([X, np.ones_like(X)])
    coef, res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    slope = float(coef[0])
    dof = len(pts) - 2
    if dof > 0 and res.size:
        s2 = float(res[0]) / dof
        sxx = float(np.sum((X - X.mean()) ** 2))
        stderr = float(np.sqrt(s2 / sxx))
    else:
        stderr = 0.0
    return slope, stderr


def _condition_F(alpha: float, d: int) -> float:
    return max(
        (alpha - d / 2.0) / (3.0 * alpha - 2.0 * d + 1.0),
        (alpha - d / 2.0) ** 2 / (4.0 * (alpha - d) * (alpha + 1.0 - d)),
    )


def check_coverage_conditions(alpha: float, beta: float, d: int = 2) -> dict:
    """Evaluate the three closed-form coverage inequalities plus the
    alpha <= beta + d/2 compatibility constraint."""
    if d not in (1, 2, 3):
        raise DomainError("dimension d must be 1, 2 or 3")

    lhs1 = ((2.0 * alpha - 1.0 - d) / (2.0 * alpha + 2.0 + d)) * (
        (alpha - 1.0 - d) / (alpha + 1.0 - d / 2.0)
    )
    if d == 1:
        cond1 = lhs1 > 1.0 / 3.0
    else:
        cond1 = lhs1 > _condition_F(alpha, d)

    if d == 1:
        denom = 6.0 * (alpha - 1.0) * (alpha + 1.0) - (alpha + 3.0) * (4.0 * alpha + 3.0)
        cond2 = denom > 0.0 and alpha > (d / 2.0) * (
            6.0 * (alpha - 1.0) * (alpha + 1.0) / denom
        )
    else:
        F = _condition_F(alpha, d)
        inner = (
            1.0
            + (d / 2.0) * (alpha + 3.0) / ((alpha - 1.0) * (alpha + 1.0))
            - (alpha + 3.0) * (2.0 * alpha + 2.0 + d) / ((alpha - 1.0) * (alpha + 1.0)) * F
        )
        cond2 = inner > 0.0 and alpha > (d / 2.0) / inner

    denom3 = 2.0 * (alpha - 1.0) * (alpha + 1.0) - d * (alpha + 3.0)
    cond3 = denom3 > 0.0 and beta > alpha * 2.0 * (alpha - 1.0) * (alpha + 1.0) / denom3

    compat = alpha <= beta + d / 2.0
    return {
        "cond_smoothness_info": bool(cond1),
        "cond_alpha_threshold": bool(cond2),
        "cond_beta_undersmoothing": bool(cond3),
        "cond_alpha_beta_compat": bool(compat),
        "all": bool(cond1 and cond2 and cond3 and compat),
    }


def asymptotic_report(
    psi: SpectralVector,
    theta0_coeffs: SpectralVector,
    ig: InfoGram,
    N: int,
    tau: float,
    alpha: float,
    beta: float,
    d: int = 2,
) -> AsymptoticReport:
    """One (N, alpha, beta, tau) configuration evaluated end to end."""
    c = perturbation(psi, ig, N, tau, alpha)
    s = float(np.sqrt(np.dot(psi.coeffs, c.coeffs)))
    t = scale_t(c, ig, N)
    b = bias_b(theta0_coeffs, c, tau, alpha)
    return AsymptoticReport(
        N=N,
        alpha=alpha,
        beta=beta,
        tau=tau,
        s_N=s,
        t_N=t,
        b_N=b,
        psi_bar=c,
        ratio_t_over_s=t / s,
        conditions=check_coverage_conditions(alpha, beta, d),
        condition_number=system_condition(ig, N, tau, alpha),
    )
