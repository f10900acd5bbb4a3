#!/usr/bin/env python3
"""Benchmark the numba hot loops against the pure-numpy fallback.

Runs the large selection workloads on both implementations and prints a
comparison table. The numba side pays JIT compilation once (cached on
disk); a warm-up call keeps it out of the timings.

Usage:
    python benchmarks/bench_backends.py [--n 10000] [--d 768] [--k 50] [--repeat 3]
"""

import argparse
import time

import numpy as np

from kite import _np_loops

try:
    from kite import _nb_loops
except ImportError:
    _nb_loops = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--d", type=int, default=768)
    parser.add_argument("--k", type=int, default=50)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    X = rng.standard_normal((args.n, args.d))
    z = rng.standard_normal(args.d)
    qual = np.exp(0.3 * rng.standard_normal(args.n))
    small = rng.standard_normal((2000, 5))
    small_z = rng.standard_normal(5)

    workloads = [
        ("lite_loop  n=%d d=%d k=%d" % (args.n, args.d, args.k),
         lambda impl: impl.lite_loop(X, z, args.k, 0.02, 0.5)),
        ("kite_loop  linear (same shape)",
         lambda impl: impl.kite_loop(X, z, args.k, 0.02, 0.5, 0, 1.0, 3, 1.0, True)),
        ("kite_loop  gaussian (same shape)",
         lambda impl: impl.kite_loop(X, z, args.k, 0.02, 0.5, 2, 1.0, 3, 1.0, True)),
        ("dpp_loop   gaussian (same shape)",
         lambda impl: impl.dpp_loop(X, qual, args.k, 2, 1.0, 3, 1.0)),
        ("lite_loop  n=2000 d=5 k=5 (benchmark shape)",
         lambda impl: impl.lite_loop(small, small_z, 5, 0.02, 5.0)),
        ("fps_loop   n=2000 d=5 size=50",
         lambda impl: impl.fps_loop(small, 50, 0)),
    ]

    print(f"numba available: {_nb_loops is not None}")
    header = f"{'workload':<45} {'numpy':>10} {'numba':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in workloads:
        t_np = timeit(lambda: call(_np_loops), args.repeat)
        if _nb_loops is not None:
            call(_nb_loops)  # warm-up / compile
            t_nb = timeit(lambda: call(_nb_loops), args.repeat)
            print(f"{name:<45} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>8.2f}x")
        else:
            print(f"{name:<45} {t_np:>9.4f}s {'-':>10} {'-':>9}")


if __name__ == "__main__":
    main()
