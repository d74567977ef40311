#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

The workloads mirror what the Monte Carlo studies do per path chunk: the
exponential-weighted trapezoid integral (fBm -> J), first-zero scans,
running extrema, and the cumulative integral sums used by the SDE residual
ladder.  Run after `pip install -e . --no-build-isolation`:

    python3 benchmarks/bench_kernels.py [--paths 4096] [--steps 2048] [--repeat 5]
"""

import argparse
import time

import numpy as np

from fcir_lab._kernels import pure

try:
    from fcir_lab._kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        tic = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - tic)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--paths", type=int, default=4096)
    ap.add_argument("--steps", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = args.steps + 1
    b = np.ascontiguousarray(rng.standard_normal((args.paths, n)).cumsum(axis=1))
    f = np.ascontiguousarray(np.abs(b) + 0.5)
    w = np.exp(-0.7 * np.linspace(0.0, 1.0, n))
    dt = 1.0 / args.steps

    workloads = [
        ("exp_weighted_integral", lambda m: m.exp_weighted_integral(b, w, 0.7, dt)),
        ("cumtrapz", lambda m: m.cumtrapz(f, dt)),
        ("midpoint_cumsum", lambda m: m.midpoint_cumsum(f, b)),
        ("left_cumsum", lambda m: m.left_cumsum(f, b)),
        ("first_nonpositive", lambda m: m.first_nonpositive(b)),
        ("row_extrema", lambda m: m.row_extrema(b)),
    ]

    print(f"paths={args.paths} steps={args.steps} repeat={args.repeat} "
          f"(best-of timings)")
    header = f"{'kernel':<24}{'pure [ms]':>12}{'compiled [ms]':>15}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in workloads:
        t_pure = timeit(lambda: call(pure), args.repeat) * 1e3
        if _native is None:
            print(f"{name:<24}{t_pure:>12.2f}{'n/a':>15}{'n/a':>9}")
            continue
        t_nat = timeit(lambda: call(_native), args.repeat) * 1e3
        print(f"{name:<24}{t_pure:>12.2f}{t_nat:>15.2f}{t_pure / t_nat:>8.1f}x")

    if _native is None:
        print("\ncompiled extension not built; install with a C compiler "
              "to compare backends")
    else:
        sample = _native.exp_weighted_integral(b, w, 0.7, dt)
        ref = pure.exp_weighted_integral(b, w, 0.7, dt)
        print(f"\nbackends bit-identical: {np.array_equal(sample, ref)}")


if __name__ == "__main__":
    main()
