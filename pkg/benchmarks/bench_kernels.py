#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python twin.

Two workloads:
  * order sampling — the separation experiment's inner loop: reduced-OBDD
    node counts for many sampled variable orders of the grid-3 junction
    formula (10 variables, 12 clauses);
  * truth tables — model-indicator bitsets for the doubled grid-3 formula
    (18 variables, 26 clauses), the equivalence oracle's inner step.

Run after `pip install -e . --no-build-isolation`; if the extension did not
build, only the pure backend is timed.
"""

import random
import time

from ddlab import _kernels_py as pure

try:
    from ddlab import _kernels as compiled
except ImportError:
    compiled = None

from ddlab import formulas
from ddlab.graphs import grid


def position_clauses(phi, order):
    pos = {name: p + 1 for p, name in enumerate(order)}
    return [[pos[n] if s else -pos[n] for n, s in sorted(c)]
            for c in phi.sorted_clauses()]


def bench_order_sampling(backend, phi, count, seed):
    names = sorted(phi.vars)
    rng = random.Random(seed)
    start = time.perf_counter()
    best = None
    for _ in range(count):
        order = list(names)
        rng.shuffle(order)
        size = backend.obdd_size_for_order(len(order), position_clauses(phi, order))
        best = size if best is None else min(best, size)
    return time.perf_counter() - start, best


def bench_truth_tables(backend, phi, count):
    names = sorted(phi.vars)
    clauses = position_clauses(phi, names)
    start = time.perf_counter()
    acc = 0
    for _ in range(count):
        acc ^= backend.cnf_truth_table(len(names), clauses)
    return time.perf_counter() - start, acc.bit_count()


def main():
    backends = [("python", pure)]
    if compiled is not None:
        backends.insert(0, ("cython", compiled))
    junction = formulas.grid_junction_formula(3)
    psi = formulas.psi_formula(grid(3).graph)

    print(f"{'workload':<28} {'backend':<8} {'time':>9}  result")
    rows = {}
    for name, backend in backends:
        t, best = bench_order_sampling(backend, junction, 2000, seed=7)
        rows.setdefault("order-sampling", {})[name] = t
        print(f"{'order-sampling (2000x10v)':<28} {name:<8} {t:>8.3f}s  min size {best}")
    for name, backend in backends:
        t, ones = bench_truth_tables(backend, psi, 20)
        rows.setdefault("truth-tables", {})[name] = t
        print(f"{'truth-tables (20x18v)':<28} {name:<8} {t:>8.3f}s  parity popcount {ones}")
    if compiled is not None:
        for workload, times in rows.items():
            speedup = times["python"] / times["cython"]
            print(f"{workload}: compiled speedup {speedup:.1f}x")


if __name__ == "__main__":
    main()
