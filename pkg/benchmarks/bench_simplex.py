#!/usr/bin/env python3
"""Benchmark the compiled simplex kernel against the numpy fallback.

Two representative workloads:

* enumeration: the 2^n pattern scan on random planar data (many tiny LPs,
  where per-pivot overhead dominates);
* certification: one global-minimum margin LP at the width used by the
  zero-loss experiments (hundreds of rows, where pivot arithmetic dominates).

Usage: python3 benchmarks/bench_simplex.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from reluregions import lp_max_margin, normalize_rows
from reluregions.experiments import gen_cube_data, gen_labels, init_params
from reluregions.lp import available_kernels
from reluregions.model import activation_pattern
from reluregions.optimize import region_global_min_report


def workload_enumeration(kernel: str) -> int:
    rng = np.random.default_rng(0)
    X = rng.standard_normal((2, 11))
    solved = 0
    n = X.shape[1]
    for code in range(2**n):
        a = np.array([(code >> j) & 1 for j in range(n)], dtype=float)
        G = normalize_rows((2 * a - 1)[:, None] * X.T)
        lp_max_margin(G, cap=1.0, kernel=kernel)
        solved += 1
    return solved


def workload_certification(kernel: str) -> int:
    import reluregions.lp as lp_module

    previous = lp_module._BACKEND
    lp_module._BACKEND = kernel  # route the nested LP through one kernel
    try:
        rng = np.random.default_rng(1)
        n, d1 = 5, 93
        solved = 0
        for _ in range(5):
            X = gen_cube_data(1, n, rng)
            y = gen_labels("random", X, rng, d1=d1)
            p = init_params("he", 1, d1, rng)
            pattern, degenerate = activation_pattern(p, X)
            if degenerate:
                continue
            region_global_min_report(pattern, X, y, p.v)
            solved += 1
        return solved
    finally:
        lp_module._BACKEND = previous


def run(name, fn, kernels, repeat):
    print(f"\n{name}")
    reference = None
    for kernel in kernels:
        best = float("inf")
        for _ in range(repeat):
            start = time.perf_counter()
            count = fn(kernel)
            best = min(best, time.perf_counter() - start)
        note = ""
        if reference is None:
            reference = best
        else:
            note = f"  ({best / reference:.2f}x the {kernels[0]} time)"
        print(f"  {kernel:>9}: {best:.3f}s for {count} solves{note}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    kernels = sorted(available_kernels())
    if len(kernels) < 2:
        print("compiled kernel not built; benchmarking the fallback only")
    run("pattern enumeration (2^11 tiny LPs, d0=2)", workload_enumeration, kernels, args.repeat)
    run("zero-loss certification (5 LPs, 465 rows x 183 vars)", workload_certification, kernels, args.repeat)


if __name__ == "__main__":
    main()
