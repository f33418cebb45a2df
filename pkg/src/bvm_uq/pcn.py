"""Preconditioned Crank-Nicolson sampling of the posterior.

The chain state lives in the truncated spectral basis, where prior draws
are diagonal.  The proposal theta' = sqrt(1 - beta^2) theta + beta * xi
(xi a fresh prior draw) is reversible with respect to the prior, so the
accept step uses the likelihood ratio only.  Each likelihood evaluation
synthesizes the state to the grid and runs one forward solve.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ChainQualityError, SolverConvergenceError, TuningError
from .forward import Dataset, ProblemSpec, _Interpolator
from .grids import SpectralVector, _sine_table
from .prior import PriorSpec
from .solver import solve_dirichlet

__all__ = ["ChainConfig", "Chain", "make_loglik", "pcn_step", "run_chain", "tune_beta"]

BETA_FLOOR = 1e-4


@dataclass
class ChainConfig:
    S: int
    prior: PriorSpec
    seed: int = 0
    burn_in: int | None = None  # defaults to S // 5
    beta_pcn: float = 0.99
    thin: int = 1
    data: Dataset | None = None
    problem: ProblemSpec | None = None
    target_accept: tuple[float, float] = (0.5, 0.6)

    def __post_init__(self):
        if not 0.0 < self.beta_pcn <= 1.0:
            raise ValueError(f"beta_pcn must lie in (0, 1], got {self.beta_pcn}")
        if self.burn_in is None:
            self.burn_in = self.S // 5
        if self.burn_in >= self.S:
            raise ValueError(f"burn_in={self.burn_in} must be < S={self.S}")
        if (self.data is None) != (self.problem is None):
            raise ValueError("data and problem must be provided together")


@dataclass
class Chain:
    states: np.ndarray  # (n_kept, J^2) post-burn-in
    log_liks: np.ndarray
    accept_rate: float
    config: ChainConfig
    solver_failures: int = 0

    def to_files(self, states_path, summary_path, psi: SpectralVector | None = None,
                 trace_path=None):
        J = self.config.prior.J
        with open(states_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "j", "k", "coeff"])
            for it, state in enumerate(self.states):
                C = state.reshape(J, J)
                for j in range(1, J + 1):
                    for k in range(1, J + 1):
                        writer.writerow([it, j, k, repr(float(C[j - 1, k - 1]))])
        if trace_path is not None and psi is not None:
            vals = self.states @ psi.coeffs
            with open(trace_path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["iter", "psi_functional", "log_lik"])
                for it, (v, ll) in enumerate(zip(vals, self.log_liks)):
                    writer.writerow([it, repr(float(v)), repr(float(ll))])
        with open(summary_path, "w") as fh:
            json.dump(
                {
                    "accept_rate": self.accept_rate,
                    "S": self.config.S,
                    "burn_in": self.config.burn_in,
                    "beta_pcn": self.config.beta_pcn,
                    "seed": self.config.seed,
                    "solver_failures": self.solver_failures,
                },
                fh,
                indent=2,
            )


def make_loglik(prior: PriorSpec, data: Dataset, problem: ProblemSpec
                ) -> Callable[[np.ndarray], float]:
    """Likelihood evaluator on flat spectral coefficients.

    Precomputes the synthesis tables and interpolation weights once; each
    call costs one assembly plus one CG solve.
    """
    grid = prior.grid
    S = _sine_table(grid.m, prior.J)
    interp = _Interpolator(grid, data.xs)
    inv_two_sigma2 = 0.5 / data.sigma**2
    f = problem.sign * problem.f_source.values
    from .grids import GridField

    f_field = GridField(grid, f)

    def loglik(coeffs: np.ndarray) -> float:
        C = coeffs.reshape(prior.J, prior.J)
        theta = 2.0 * np.einsum("ky,jk,jx->yx", S, C, S)
        a = GridField(grid, np.exp(theta) + problem.k_min)
        u = solve_dirichlet(a, f_field, problem.g_boundary, problem.solve_cfg)
        resid = data.ys - interp(u.values)
        return float(-inv_two_sigma2 * np.dot(resid, resid))

    return loglik


def _zero_loglik(_coeffs: np.ndarray) -> float:
    return 0.0


def pcn_step(current: np.ndarray, current_ll: float, beta: float,
             mode_sds: np.ndarray, loglik, rng: np.random.Generator):
    """One pCN proposal/accept step.  Returns (state, ll, accepted, failed)."""
    xi = mode_sds * rng.standard_normal(current.shape)
    proposal = np.sqrt(1.0 - beta * beta) * current + beta * xi
    u = rng.uniform()
    try:
        prop_ll = loglik(proposal)
    except SolverConvergenceError:
        return current, current_ll, False, True
    if np.log(u) < min(0.0, prop_ll - current_ll):
        return proposal, prop_ll, True, False
    return current, current_ll, False, False


def run_chain(cfg: ChainConfig, loglik: Callable[[np.ndarray], float] | None = None
              ) -> Chain:
    """Run S pCN steps from a prior draw; record post-burn-in states.

    ``loglik`` overrides the likelihood (used for linearized-model tests);
    with no data configured the chain targets the prior.
    """
    if loglik is None:
        if cfg.data is None:
            loglik = _zero_loglik
        else:
            loglik = make_loglik(cfg.prior, cfg.data, cfg.problem)

    rng = np.random.default_rng(cfg.seed)
    mode_sds = cfg.prior.mode_sds
    state = mode_sds * rng.standard_normal(mode_sds.shape)
    ll = loglik(state)

    n_kept = (cfg.S - cfg.burn_in + cfg.thin - 1) // cfg.thin
    states = np.empty((n_kept, mode_sds.size))
    lls = np.empty(n_kept)
    accepted = 0
    failures = 0
    kept = 0
    for s in range(cfg.S):
        state, ll, acc, failed = pcn_step(state, ll, cfg.beta_pcn, mode_sds, loglik, rng)
        accepted += acc
        failures += failed
        if s >= cfg.burn_in and (s - cfg.burn_in) % cfg.thin == 0:
            states[kept] = state
            lls[kept] = ll
            kept += 1
    if failures > 0.01 * cfg.S:
        raise ChainQualityError(
            f"{failures} solver failures out of {cfg.S} steps (> 1%)"
        )
    return Chain(
        states=states[:kept],
        log_liks=lls[:kept],
        accept_rate=accepted / cfg.S,
        config=cfg,
        solver_failures=failures,
    )


def tune_beta(cfg: ChainConfig, pilot_steps: int = 500,
              loglik: Callable[[np.ndarray], float] | None = None) -> float:
    """Stochastic-approximation tuning of beta toward ~55% acceptance.

    Runs segments of a pilot chain, nudging log(beta) after each segment;
    tuning happens strictly before any recorded run.  Raises TuningError
    if the pilot acceptance stays pinned at 0 or 1 away from the beta
    bounds.
    """
    if pilot_steps < 100:
        raise ValueError("pilot_steps must be >= 100")
    if loglik is None:
        if cfg.data is None:
            loglik = _zero_loglik
        else:
            loglik = make_loglik(cfg.prior, cfg.data, cfg.problem)

    rng = np.random.default_rng(cfg.seed ^ 0x9E3779B9)
    mode_sds = cfg.prior.mode_sds
    state = mode_sds * rng.standard_normal(mode_sds.shape)
    ll = loglik(state)
    beta = cfg.beta_pcn
    target = 0.5 * (cfg.target_accept[0] + cfg.target_accept[1])

    segment = 50
    n_segments = max(pilot_steps // segment, 2)
    acc_rate = 0.0
    for seg in range(n_segments):
        acc = 0
        for _ in range(segment):
            state, ll, a, _ = pcn_step(state, ll, beta, mode_sds, loglik, rng)
            acc += a
        acc_rate = acc / segment
        gain = 1.0 / np.sqrt(seg + 1.0)
        beta = float(np.clip(beta * np.exp(gain * (acc_rate - target)), BETA_FLOOR, 1.0))

    if acc_rate >= 0.999 and beta < 1.0:
        raise TuningError(f"acceptance pinned at 1 with beta={beta}")
    if acc_rate <= 0.001 and beta > BETA_FLOOR:
        raise TuningError(f"acceptance pinned at 0 with beta={beta}")
    return beta
