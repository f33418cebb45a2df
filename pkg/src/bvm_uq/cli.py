"""Command-line entry point: forward | sample | asymptotics | coverage.

Every command reads a JSON config, writes its artifacts under --out and
finishes with a run manifest carrying the canonical config hash, so equal
configs reproduce equal outputs.  Exit codes: 0 success, 2 config error,
3 numerical failure, 4 statistical-quality failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BvmUqError, ChainQualityError, ConfigError, SolverConvergenceError
from .forward import analytic_poisson_solution, darcy_poisson_problem, forward, grid_design, observe
from .grids import Grid, GridField, bump_psi_coeffs
from .inference import (
    ExperimentConfig,
    coverage_experiment,
    credible_interval,
    functional_trace,
    histogram_csv,
)
from .pcn import ChainConfig, run_chain, tune_beta
from .prior import PriorSpec, tau_star
from .asymptotics import asymptotic_report, build_info_gram
from .score import LinearizationPoint

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_QUALITY = 4


def canonical_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _validate_common(cfg: dict):
    prior = cfg.get("prior")
    m = cfg.get("problem", {}).get("m")
    if prior is not None:
        alpha = prior.get("alpha")
        if alpha is not None and alpha <= 3:
            raise ConfigError(f"prior.alpha must exceed 1 + d = 3, got {alpha}")
        J = prior.get("J")
        if J is not None and m is not None and J > m:
            raise ConfigError(f"prior.J={J} exceeds grid m={m}")
    sigma = cfg.get("sigma")
    if sigma is not None and sigma <= 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    chain = cfg.get("chain")
    if chain is not None:
        S = chain.get("S")
        burn = chain.get("burn_in")
        if S is not None and burn is not None and burn >= S:
            raise ConfigError(f"chain.burn_in={burn} must be < chain.S={S}")


def _write_manifest(out: Path, cfg: dict, base_seed, outputs, t0: float):
    manifest = {
        "config_hash": canonical_hash(cfg),
        "tool_version": __version__,
        "base_seed": base_seed,
        "outputs": [str(p.relative_to(out)) for p in outputs],
        "wall_time": time.time() - t0,
    }
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    missing = [str(p) for p in outputs if not p.exists()]
    if missing:
        raise BvmUqError(f"manifest lists missing outputs: {missing}")


def _resolve_tau(prior_cfg: dict, N: int, alpha: float, beta: float, d: int = 2) -> float:
    tau = prior_cfg.get("tau", 1.0)
    if tau == "auto":
        return tau_star(N, alpha, beta, d)
    return float(tau)


def cmd_forward(cfg: dict, out: Path, seed: int, threads: int) -> int:
    t0 = time.time()
    m = int(cfg.get("problem", {}).get("m", 64))
    grid = Grid(m)
    problem = darcy_poisson_problem(grid, k_min=float(cfg.get("problem", {}).get("k_min", 0.0)))
    theta0 = GridField(grid, np.zeros((grid.n, grid.n)))
    u = forward(theta0, problem)
    outputs = []
    u_path = out / "u_field.csv"
    u.to_csv(u_path)
    outputs.append(u_path)
    if cfg.get("analytic_check", True):
        exact = analytic_poisson_solution(grid)
        max_err = float(np.max(np.abs(u.values - exact.values)))
        rep_path = out / "error_report.json"
        with open(rep_path, "w") as fh:
            json.dump(
                {"m": m, "h": grid.h, "max_error": max_err,
                 "bound_2h2": 2.0 * grid.h**2, "within_bound": max_err <= 2.0 * grid.h**2},
                fh, indent=2,
            )
        outputs.append(rep_path)
    _write_manifest(out, cfg, seed, outputs, t0)
    return EXIT_OK


def _prior_from_cfg(cfg: dict, grid: Grid, N: int) -> PriorSpec:
    pc = cfg["prior"]
    alpha = float(pc["alpha"])
    beta = float(pc.get("beta", alpha))
    tau = _resolve_tau(pc, N, alpha, beta)
    return PriorSpec(alpha=alpha, tau=tau, J=int(pc.get("J", 8)), grid=grid)


def cmd_sample(cfg: dict, out: Path, seed: int, threads: int) -> int:
    t0 = time.time()
    m = int(cfg.get("problem", {}).get("m", 64))
    grid = Grid(m)
    problem = darcy_poisson_problem(grid, k_min=float(cfg.get("problem", {}).get("k_min", 0.0)))
    sqrt_n = int(cfg["design"].get("sqrt_n", 20))
    N = sqrt_n * sqrt_n
    prior = _prior_from_cfg(cfg, grid, N)
    sigma = float(cfg["sigma"])

    theta0 = GridField(grid, np.zeros((grid.n, grid.n)))
    u_true = forward(theta0, problem)
    base_seed = seed if seed is not None else int(cfg.get("base_seed", 0))
    data = observe(u_true, grid_design(sqrt_n), sigma, seed=base_seed)

    chain_cfg = cfg["chain"]
    beta_setting = chain_cfg.get("beta_pcn", 0.99)
    ccfg = ChainConfig(
        S=int(chain_cfg["S"]),
        burn_in=chain_cfg.get("burn_in"),
        beta_pcn=0.99 if beta_setting == "tune" else float(beta_setting),
        seed=base_seed,
        prior=prior,
        data=data,
        problem=problem,
    )
    tuned_beta = None
    pilot_accept = None
    if beta_setting == "tune":
        tuned_beta = tune_beta(ccfg, pilot_steps=500)
        ccfg = ChainConfig(
            S=ccfg.S, burn_in=ccfg.burn_in, beta_pcn=tuned_beta, seed=base_seed,
            prior=prior, data=data, problem=problem,
        )
    chain = run_chain(ccfg)
    psi = bump_psi_coeffs(grid, prior.J)
    trace = functional_trace(chain, psi)
    interval = credible_interval(trace, float(cfg.get("gamma", 0.05)))

    outputs = []
    trace_path = out / "trace.csv"
    states_path = out / "states.csv"
    summary_path = out / "summary.json"
    chain.to_files(states_path, summary_path, psi=psi, trace_path=trace_path)
    if tuned_beta is not None:
        with open(summary_path) as fh:
            summary = json.load(fh)
        summary["tuned_beta"] = tuned_beta
        summary["pilot_accept_target"] = list(ccfg.target_accept)
        with open(summary_path, "w") as fh:
            json.dump(summary, fh, indent=2)
    hist_path = out / "histogram.csv"
    markers_path = out / "markers.json"
    histogram_csv(trace, int(cfg.get("bins", 40)), hist_path, markers_path,
                  interval=interval)
    outputs += [states_path, trace_path, summary_path, hist_path, markers_path]
    _write_manifest(out, cfg, base_seed, outputs, t0)
    return EXIT_OK


def cmd_asymptotics(cfg: dict, out: Path, seed: int, threads: int) -> int:
    t0 = time.time()
    m = int(cfg.get("problem", {}).get("m", 64))
    grid = Grid(m)
    problem = darcy_poisson_problem(grid, k_min=float(cfg.get("problem", {}).get("k_min", 0.0)))
    pc = cfg["prior"]
    alpha = float(pc["alpha"])
    beta = float(pc.get("beta", alpha))
    J = int(pc.get("J", 8))
    if J > m:
        raise ConfigError(f"prior.J={J} exceeds grid m={m}")
    d = int(cfg.get("d", 2))
    sweep = [int(N) for N in cfg.get("N_sweep", [100, 1000, 10000, 100000])]

    theta0 = GridField(grid, np.zeros((grid.n, grid.n)))
    lp = LinearizationPoint(theta0, problem)
    ig = build_info_gram(lp, J)
    psi = bump_psi_coeffs(grid, J)
    from .grids import analyze

    theta0_coeffs = analyze(theta0, J)

    outputs = []
    sweep_path = out / "sweep.csv"
    with open(sweep_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "tau", "s_N", "t_N", "b_N", "ratio"])
        for N in sweep:
            tau = _resolve_tau(pc, N, alpha, beta, d)
            report = asymptotic_report(psi, theta0_coeffs, ig, N, tau, alpha, beta, d)
            rp = out / f"report_N{N}.json"
            report.to_json(rp)
            outputs.append(rp)
            writer.writerow(
                [N, repr(float(tau)), repr(float(report.s_N)), repr(float(report.t_N)),
                 repr(float(report.b_N)), repr(float(report.ratio_t_over_s))]
            )
    outputs.append(sweep_path)
    _write_manifest(out, cfg, seed, outputs, t0)
    return EXIT_OK


def cmd_coverage(cfg: dict, out: Path, seed: int, threads: int) -> int:
    t0 = time.time()
    m = int(cfg.get("problem", {}).get("m", 64))
    grid = Grid(m)
    problem = darcy_poisson_problem(grid, k_min=float(cfg.get("problem", {}).get("k_min", 0.0)))
    sqrt_n = int(cfg["design"].get("sqrt_n", 20))
    N = sqrt_n * sqrt_n
    prior = _prior_from_cfg(cfg, grid, N)
    base_seed = seed if seed is not None else int(cfg.get("base_seed", 0))

    chain_cfg = cfg["chain"]
    theta0 = GridField(grid, np.zeros((grid.n, grid.n)))
    ec = ExperimentConfig(
        theta0=theta0,
        problem=problem,
        prior=prior,
        sigma=float(cfg["sigma"]),
        design_kind=cfg["design"].get("kind", "grid"),
        sqrt_n=sqrt_n,
        chain_S=int(chain_cfg["S"]),
        chain_burn_in=chain_cfg.get("burn_in"),
        beta_pcn=chain_cfg.get("beta_pcn", 0.99),
        replicates=int(cfg.get("replicates", 50)),
        gamma=float(cfg.get("gamma", 0.05)),
        base_seed=base_seed,
        n_jobs=threads,
    )
    report = coverage_experiment(ec)
    outputs = []
    rep_path = out / "coverage.json"
    report.to_json(rep_path)
    csv_path = out / "replicates.csv"
    report.per_replicate_csv(csv_path)
    outputs += [rep_path, csv_path]
    _write_manifest(out, cfg, base_seed, outputs, t0)
    return EXIT_OK


COMMANDS = {
    "forward": cmd_forward,
    "sample": cmd_sample,
    "asymptotics": cmd_asymptotics,
    "coverage": cmd_coverage,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bvm-uq")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("BVM_UQ_THREADS", "1"))

    try:
        cfg = _load_config(args.config)
        _validate_common(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out, args.seed, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KeyError, ValueError) as exc:
        print(f"config error: {exc!r}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ChainQualityError as exc:
        print(f"chain quality failure: {exc}", file=sys.stderr)
        return EXIT_QUALITY
    except BvmUqError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
