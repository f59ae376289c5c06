#!/usr/bin/env python3
"""Time the numba kernels against their pure-numpy twins.

Run:  python benchmarks/bench_kernels.py [--quick]

The two hot paths are the cyclic Jacobi eigensolver sweep and the
reflection-iteration driver.  Both backends execute the same pivot order
and per-element arithmetic; this script reports wall time and speedup.
Re-run with CIMMINO_DISABLE_NUMBA=1 to confirm the package itself falls
back cleanly (the numba column simply disappears).
"""

import argparse
import time

import numpy as np

from cimmino import kernels


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_jacobi(n, repeats):
    rng = np.random.default_rng(1)
    m = rng.standard_normal((n, n))
    b = (m + m.T) / 2.0
    thresh_sq = (1e-12 ** 2) * float(np.sum(b * b))

    def run(fn):
        def body():
            work = b.copy()
            basis = np.eye(n)
            fn(work, basis, thresh_sq, 100)
        return body

    rows = {}
    rows["numpy"] = _best_of(run(kernels._jacobi_cycle_numpy), repeats)
    if kernels.HAS_NUMBA:
        run(kernels._jacobi_cycle_numba)()  # warm the JIT outside timing
        rows["numba"] = _best_of(run(kernels._jacobi_cycle_numba), repeats)
    return rows


def bench_iterate(n, max_iter, repeats):
    rng = np.random.default_rng(2)
    a = rng.standard_normal((n, n))
    b = rng.standard_normal(n)
    # Small uniform weights keep the run contractive-but-slow so the full
    # iteration budget is exercised.
    coef = 0.4 / np.sum(a * a, axis=1)
    x0 = np.zeros(n)
    stop_abs = 1e-300

    def run(fn):
        def body():
            hist = np.empty((max_iter + 1, n))
            resn = np.empty(max_iter + 1)
            fn(a, b, coef, x0, hist, resn, stop_abs, 1e150)
        return body

    rows = {}
    rows["numpy"] = _best_of(run(kernels._iterate_numpy), repeats)
    if kernels.HAS_NUMBA:
        run(kernels._iterate_numba)()
        rows["numba"] = _best_of(run(kernels._iterate_numba), repeats)
    return rows


def _print_row(name, size, rows):
    numpy_t = rows["numpy"]
    if "numba" in rows:
        numba_t = rows["numba"]
        print(f"{name:<28} {size:<14} {numba_t:>12.4f} {numpy_t:>12.4f} {numpy_t / numba_t:>9.1f}x")
    else:
        print(f"{name:<28} {size:<14} {'-':>12} {numpy_t:>12.4f} {'-':>10}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    args = parser.parse_args()

    repeats = 2 if args.quick else 3
    jacobi_n = 48 if args.quick else 120
    iter_n = 128 if args.quick else 256
    iter_steps = 500 if args.quick else 2000

    print(f"active backend: {kernels.backend_name()}")
    if not kernels.HAS_NUMBA:
        print("numba unavailable or disabled; timing the numpy path only\n")
    print(f"{'kernel':<28} {'size':<14} {'numba (s)':>12} {'numpy (s)':>12} {'speedup':>10}")
    _print_row("jacobi_cycle", f"n={jacobi_n}", bench_jacobi(jacobi_n, repeats))
    _print_row("iterate", f"n={iter_n} x{iter_steps}", bench_iterate(iter_n, iter_steps, repeats))


if __name__ == "__main__":
    main()
