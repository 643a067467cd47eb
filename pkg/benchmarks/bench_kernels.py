#!/usr/bin/env python3
"""Benchmark the compiled chain kernel against the pure-Python fallback.

Both kernels produce bit-identical traces; this script measures the speed
difference on representative workloads and verifies the parity while at it.

Usage: python benchmarks/bench_kernels.py [--steps N]
"""

import argparse
import time

import numpy as np

from polyaurn import (
    available_kernels,
    cycle_graph,
    dirac,
    make_urn,
    product,
    run,
    walk_urn,
)
from polyaurn.graphs import cartesian_product


def friedman():
    return make_urn(2, [dirac((0, 1)), dirac((1, 0))], [1, 1], [1, 1])


def workloads(steps):
    c5 = cycle_graph(5)
    yield "friedman x friedman (4 colours)", product(friedman(), friedman()), steps
    yield "walk on C5 [] C5 (25 colours)", walk_urn(cartesian_product(c5, c5), 0), steps
    yield "classic polya (2 colours)", make_urn(
        2, [dirac((1, 0)), dirac((0, 1))], [1, 1], [1, 1]
    ), steps


def bench(urn, steps, kernel, repeats=3):
    best = float("inf")
    trace = None
    for _ in range(repeats):
        start = time.perf_counter()
        trace = run(urn, steps, seed=1, snapshot_stride=steps // 10, kernel=kernel)
        best = min(best, time.perf_counter() - start)
    return best, trace


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=1_000_000)
    args = parser.parse_args()

    kernels = available_kernels()
    print(f"kernels: {', '.join(kernels)}")
    for name, urn, steps in workloads(args.steps):
        print(f"\n{name}, {steps:,} steps")
        times = {}
        traces = {}
        for kernel in kernels:
            elapsed, trace = bench(urn, steps, kernel)
            times[kernel] = elapsed
            traces[kernel] = trace
            print(f"  {kernel:>7}: {elapsed:8.3f}s  ({steps / elapsed / 1e6:6.2f} M steps/s)")
        if len(kernels) == 2:
            print(f"  speedup: {times['python'] / times['cython']:.1f}x")
            a, b = traces["cython"], traces["python"]
            assert a.final == b.final
            assert np.array_equal(a.snapshot_counts, b.snapshot_counts)
            print("  parity: identical traces")


if __name__ == "__main__":
    main()
