#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python/numpy fallback.

Times the workloads that dominate the verification suites: scoring a
ballot profile per dollar, enumerating all complete allocations, and the
best-response sweep (tally + utility for every candidate vote).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pbvote import _kernels_py as pure

try:
    from pbvote import _kernels as compiled
except ImportError:
    compiled = None


def workload(seed: int, m: int, cap: int, n_voters: int):
    rng = np.random.default_rng(seed)
    caps = np.full(m, cap, dtype=np.int64)
    total = int(caps.sum())
    budget = total // 2
    ballots = np.stack(
        [np.array([rng.integers(0, c + 1) for c in caps]) for _ in range(n_voters)]
    ).astype(np.int64)
    rank = np.arange(total, dtype=np.int64)
    marginals = rng.integers(0, 10, size=total).astype(np.int64)
    off = 0
    for c in caps:
        marginals[off : off + c] = -np.sort(-marginals[off : off + c])
        off += c
    return caps, budget, ballots, rank, marginals


def run(impl, caps, budget, ballots, rank, marginals, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        scores = impl.score_profile(ballots, caps)
        candidates = impl.enumerate_complete(caps, budget)
        impl.sweep_utilities(scores, candidates, caps, rank, budget, marginals)
        impl.dot_expanded(scores, candidates, caps)
        best = min(best, time.perf_counter() - start)
    return best, len(candidates)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    shapes = [
        ("small instance (4 projects, cap 3, 5 voters)", 11, 4, 3, 5),
        ("medium instance (5 projects, cap 4, 6 voters)", 12, 5, 4, 6),
        ("large sweep (6 projects, cap 4, 6 voters)", 13, 6, 4, 6),
    ]
    print(f"{'workload':45} {'votes':>7} {'python':>10} {'cython':>10} {'speedup':>8}")
    for label, seed, m, cap, voters in shapes:
        data = workload(seed, m, cap, voters)
        t_pure, n_votes = run(pure, *data, args.repeats)
        if compiled is None:
            print(f"{label:45} {n_votes:7d} {t_pure * 1e3:9.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        t_comp, _ = run(compiled, *data, args.repeats)
        print(
            f"{label:45} {n_votes:7d} {t_pure * 1e3:9.2f}ms {t_comp * 1e3:9.2f}ms "
            f"{t_pure / t_comp:7.1f}x"
        )
    if compiled is None:
        print("\ncompiled kernels unavailable; build with: pip install -e . --no-build-isolation")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
