#!/usr/bin/env python3
"""Benchmark the compiled trial kernels against the numpy fallback.

Runs the per-trial sampling/statistic workloads that dominate harness
runtime, once per backend, and prints a timing table.  Representative
shapes: a large-n row (vector throughput), a small-n row (per-trial
overhead), the Poisson search path, and the Beta inverse-CDF path.

Usage:  python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

from steinmle.montecarlo import available_backends, get_backend

WORKLOADS = [
    # label, model, theta0, beta, n, trials
    ("exp large-n (n=100000 x 200 trials)", "exp-canonical", 1.0, 1.0, 100_000, 200),
    ("exp small-n (n=10 x 20000 trials)", "exp-canonical", 1.0, 1.0, 10, 20_000),
    ("exp mean-parametrised (n=1000 x 2000)", "exp-noncanonical", 2.0, 1.0, 1_000, 2_000),
    ("poisson search (theta0=5, n=1000 x 1000)", "poisson", 5.0, 1.0, 1_000, 1_000),
    ("poisson rejection (theta0=60, n=1000 x 200)", "poisson", 60.0, 1.0, 1_000, 200),
    ("beta inverse-cdf (n=8000 x 150 trials)", "beta", 1.5, 1.0, 8_000, 150),
]


def run_workload(backend, model, theta0, beta, n, trials, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        backend.trial_stats(model, theta0, beta, n, 12345, 0, trials)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="quarter-size workloads")
    args = parser.parse_args()

    backends = {name: get_backend(name) for name in available_backends()}
    print(f"backends: {', '.join(backends)}")
    header = f"{'workload':<44}" + "".join(f"{name:>12}" for name in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, model, theta0, beta, n, trials in WORKLOADS:
        if args.quick:
            trials = max(1, trials // 4)
        times = {
            name: run_workload(mod, model, theta0, beta, n, trials)
            for name, mod in backends.items()
        }
        row = f"{label:<44}" + "".join(f"{times[name]:>11.3f}s" for name in backends)
        if "python" in times and "cython" in times:
            row += f"{times['python'] / times['cython']:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
