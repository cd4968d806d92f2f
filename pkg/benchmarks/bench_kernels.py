"""Time the numba and numpy kernel backends on representative inputs.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once untimed (numba compilation, caches) and then
``--repeat`` times; the best wall time is reported. Outputs of the two
backends are compared for equality on every run.
"""
import argparse
import time

import numpy as np

from planted_clique.kernels import BACKENDS


def cases(rng):
    n, k, T = 4096, 64, 20000
    pool = np.arange(1, n + 1, dtype=np.int64)
    swaps = rng.integers(np.arange(k), n, size=(T, k))
    yield "partial_shuffle", (pool, swaps)

    m = 40
    adj = np.triu((rng.random((m, m)) < 0.2).astype(np.uint8), 1)
    adj = adj + adj.T
    local = np.full(n + 1, -1, dtype=np.int64)
    local[rng.choice(np.arange(1, n + 1), m, replace=False)] = np.arange(m)
    x = BACKENDS["numpy"].partial_shuffle(pool, swaps)
    xp = BACKENDS["numpy"].partial_shuffle(pool, rng.integers(np.arange(k), n, size=(T, k)))
    yield "pair_phi", (x, xp, local, adj)

    m, w = 22, 6
    adj = np.triu((rng.random((m, m)) < 0.3).astype(np.uint8), 1)
    adj = adj + adj.T
    yield "subset_phi_hist", (adj, w, w * (w - 1) // 2)

    s, k = 14, 3
    from itertools import combinations
    subsets = np.array(list(combinations(range(s), k)), dtype=np.int64)
    adj = np.triu((rng.random((s, s)) < 0.3).astype(np.uint8), 1)
    adj = adj + adj.T
    yield "raw_pair_phi_hist", (subsets, adj, 3)


def best_time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    names = sorted(BACKENDS)
    print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in names) + f"{'speedup':>10}{'equal':>7}")
    for kernel, inputs in cases(rng):
        times, outs = {}, {}
        for b in names:
            times[b], outs[b] = best_time(getattr(BACKENDS[b], kernel), inputs, args.repeat)
        equal = all(np.array_equal(outs[names[0]], outs[b]) for b in names)
        speed = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        print(f"{kernel:<20}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in names)
              + f"{speed:>9.1f}x{str(equal):>7}")


if __name__ == "__main__":
    main()
