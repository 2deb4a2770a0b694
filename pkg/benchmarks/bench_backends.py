"""Benchmark: compiled extension vs pure-Python kernels.

The event-driven walk loop is the hot kernel the compiled core exists for;
slab sampling is numpy-vectorized in both backends (shared implementation)
and is listed for completeness.  Run:  python benchmarks/bench_backends.py
"""

import timeit

import numpy as np

from treejump.backend import get_kernels
from treejump.rng import RngStream


def bench_walk(kernels, events):
    iptr = np.array([0, 2, 4, 6], dtype=np.int64)
    idx = np.array([1, 2, 0, 2, 0, 1], dtype=np.int64)
    w = np.array([1.0, 0.5, 1.0, 0.7, 0.5, 0.7])
    gen = RngStream(0, 1).generator()

    def run():
        kernels.vrjp_walk(gen, iptr, idx, w, 0, True, events, np.inf, None, False, 0.0, -1)

    t = min(timeit.repeat(run, number=1, repeat=3))
    return events / t


def bench_slab(kernels, n):
    gen = RngStream(0, 2).generator()
    t = min(timeit.repeat(lambda: kernels.increment_slab(gen, 1.0, n), number=1, repeat=3))
    return n / t


def bench_neumaier(kernels, n):
    x = np.exp(RngStream(0, 3).generator().normal(0, 8, size=n))
    t = min(timeit.repeat(lambda: kernels.neumaier_sum(x), number=1, repeat=3))
    return n / t


def main():
    pure = get_kernels("pure")
    try:
        fast = get_kernels("compiled")
    except ImportError:
        fast = None
        print("compiled extension not built; showing pure backend only")

    rows = []
    rows.append(("event loop (events/s)", bench_walk(pure, 200_000), bench_walk(fast, 5_000_000) if fast else None))
    rows.append(("increment slab (samples/s)", bench_slab(pure, 2_000_000), bench_slab(fast, 2_000_000) if fast else None))
    rows.append(("compensated sum (elems/s)", bench_neumaier(pure, 2_000_000), bench_neumaier(fast, 2_000_000) if fast else None))

    name_w = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{name_w}}  {'pure':>12}  {'compiled':>12}  {'speedup':>8}")
    for name, p, f in rows:
        if f is None:
            print(f"{name:<{name_w}}  {p:>12.3g}  {'-':>12}  {'-':>8}")
        else:
            print(f"{name:<{name_w}}  {p:>12.3g}  {f:>12.3g}  {f / p:>8.1f}x")


if __name__ == "__main__":
    main()
