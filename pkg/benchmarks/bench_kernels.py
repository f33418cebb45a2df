"""Benchmark the compiled stencil/CG kernels against the numpy fallback.

Usage:  python benchmarks/bench_kernels.py [--m 64 128] [--repeats 5]
"""

import argparse
import time

import numpy as np

from bvm_uq import _kernels_py
from bvm_uq import kernels


def make_system(m, seed=0):
    rng = np.random.default_rng(seed)
    n = m + 1
    a = np.exp(0.3 * rng.standard_normal((n, n)))
    ax = np.ascontiguousarray(0.5 * (a[:, :-1] + a[:, 1:]))
    ay = np.ascontiguousarray(0.5 * (a[:-1, :] + a[1:, :]))
    rhs = np.zeros((n, n))
    rhs[1:-1, 1:-1] = rng.standard_normal((n - 2, n - 2))
    return ax, ay, rhs


def time_apply(mod, ax, ay, u, inv_h2, repeats):
    out = np.zeros_like(u)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(200):
            mod.apply_flux(ax, ay, u, out, inv_h2)
        best = min(best, (time.perf_counter() - t0) / 200)
    return best


def time_cg(mod, ax, ay, rhs, inv_h2, repeats):
    best = np.inf
    iters = 0
    for _ in range(repeats):
        x = np.zeros_like(rhs)
        t0 = time.perf_counter()
        iters, res = mod.cg_flux(ax, ay, rhs, x, inv_h2, 1e-10, 100_000)
        best = min(best, time.perf_counter() - t0)
        assert res <= 1e-10
    return best, iters


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--m", type=int, nargs="+", default=[32, 64, 128])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not kernels.COMPILED:
        print("note: compiled extension unavailable; both lanes are numpy")
    header = f"{'m':>5} {'kernel':>10} {'lane':>9} {'time':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for m in args.m:
        ax, ay, rhs = make_system(m)
        u = np.ascontiguousarray(np.random.default_rng(1).standard_normal(rhs.shape))
        inv_h2 = float(m * m)

        t_c = time_apply(kernels, ax, ay, u, inv_h2, args.repeats)
        t_p = time_apply(_kernels_py, ax, ay, u, inv_h2, args.repeats)
        print(f"{m:>5} {'apply':>10} {'compiled':>9} {t_c * 1e6:>10.1f}us {t_p / t_c:>7.1f}x")
        print(f"{m:>5} {'apply':>10} {'numpy':>9} {t_p * 1e6:>10.1f}us {'':>8}")

        t_c, it_c = time_cg(kernels, ax, ay, rhs, inv_h2, args.repeats)
        t_p, it_p = time_cg(_kernels_py, ax, ay, rhs, inv_h2, args.repeats)
        assert it_c == it_p or abs(it_c - it_p) <= 2
        print(f"{m:>5} {'cg':>10} {'compiled':>9} {t_c * 1e3:>10.2f}ms {t_p / t_c:>7.1f}x")
        print(f"{m:>5} {'cg':>10} {'numpy':>9} {t_p * 1e3:>10.2f}ms {'':>8}")


if __name__ == "__main__":
    main()
