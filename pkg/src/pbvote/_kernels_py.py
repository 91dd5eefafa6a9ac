"""Pure-Python/numpy implementation of the hot per-dollar kernels.

This is the fallback selected when the compiled extension is unavailable
(or when ``PBVOTE_PURE=1``). Both implementations share this contract:

* projects are flat-indexed in config order, dollars ascending, so the
  subproject ``(p, t)`` lives at ``offset[p] + t - 1``;
* ``rank`` holds each flat subproject's tie-break position (lower wins);
* all inputs are int64 arrays; ballots and candidates are per-project
  amount vectors whose per-dollar expansion is implicit.

Selections assume score vectors that are non-increasing within each
project (true for any profile of prefix-closed votes), which makes the
greedy top-B pick prefix-closed as well.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def _offsets(caps: np.ndarray) -> np.ndarray:
    out = np.zeros(len(caps), dtype=np.int64)
    np.cumsum(caps[:-1], out=out[1:])
    return out


def score_profile(ballots: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """Per-dollar inclusion counts: score[(p,t)] = #{v : ballots[v,p] >= t}."""
    ballots = np.asarray(ballots, dtype=np.int64)
    caps = np.asarray(caps, dtype=np.int64)
    scores = np.zeros(int(caps.sum()), dtype=np.int64)
    off = _offsets(caps)
    for p in range(len(caps)):
        cap = int(caps[p])
        scores[off[p] : off[p] + cap] = (
            ballots[:, p : p + 1] > np.arange(cap, dtype=np.int64)
        ).sum(axis=0)
    return scores


def selection_keys(scores: np.ndarray, rank: np.ndarray) -> np.ndarray:
    """Indices of all subprojects sorted by (score desc, tie-break rank asc)."""
    return np.lexsort((rank, -scores))


def select_top(
    scores: np.ndarray, rank: np.ndarray, caps: np.ndarray, budget: int
) -> np.ndarray:
    """Amounts vector of the top-``budget`` dollars by (score, tie-break)."""
    caps = np.asarray(caps, dtype=np.int64)
    picked = selection_keys(np.asarray(scores, dtype=np.int64), rank)[:budget]
    off = _offsets(caps)
    projects = np.searchsorted(off, picked, side="right") - 1
    return np.bincount(projects, minlength=len(caps)).astype(np.int64)


def expand_amounts(amounts: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """0/1 per-dollar membership vector of an amounts vector."""
    caps = np.asarray(caps, dtype=np.int64)
    out = np.zeros(int(caps.sum()), dtype=np.int64)
    off = _offsets(caps)
    for p, w in enumerate(np.asarray(amounts, dtype=np.int64)):
        out[off[p] : off[p] + w] = 1
    return out


def overlap_many(allocations: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Overlap (sum of per-project minima) of each row with ``reference``."""
    return np.minimum(
        np.asarray(allocations, dtype=np.int64), np.asarray(reference, dtype=np.int64)
    ).sum(axis=1)


def dot_expanded(scores: np.ndarray, candidates: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """For each candidate amounts row, the score total of its expansion."""
    scores = np.asarray(scores, dtype=np.int64)
    candidates = np.asarray(candidates, dtype=np.int64)
    caps = np.asarray(caps, dtype=np.int64)
    off = _offsets(caps)
    # prefix[p, w] = sum of the first w dollar scores of project p
    totals = np.zeros(len(candidates), dtype=np.int64)
    for p in range(len(caps)):
        prefix = np.concatenate(
            ([0], np.cumsum(scores[off[p] : off[p] + int(caps[p])]))
        )
        totals += prefix[candidates[:, p]]
    return totals


def count_complete(caps, budget: int) -> int:
    """Number of amounts vectors with 0 <= w_p <= cap_p summing to ``budget``.

    Exact (Python ints), so it never overflows while sizing a search space.
    """
    ways = [1] + [0] * budget
    for cap in caps:
        new = [0] * (budget + 1)
        running = 0
        for b in range(budget + 1):
            running += ways[b]
            if b - int(cap) - 1 >= 0:
                running -= ways[b - int(cap) - 1]
            new[b] = running
        ways = new
    return ways[budget]


def enumerate_complete(caps: np.ndarray, budget: int) -> np.ndarray:
    """All amounts vectors with the given caps summing to ``budget``.

    Rows are in ascending lexicographic order of the amounts vector.
    """
    caps = np.asarray(caps, dtype=np.int64)
    m = len(caps)
    count = count_complete(caps, budget)
    out = np.empty((count, m), dtype=np.int64)
    suffix_cap = np.concatenate((np.cumsum(caps[::-1])[::-1], [0]))
    row = np.zeros(m, dtype=np.int64)
    idx = 0

    def fill(p: int, remaining: int):
        nonlocal idx
        if p == m:
            out[idx] = row
            idx += 1
            return
        lo = max(0, remaining - int(suffix_cap[p + 1]))
        hi = min(int(caps[p]), remaining)
        for w in range(lo, hi + 1):
            row[p] = w
            fill(p + 1, remaining - w)
        row[p] = 0

    fill(0, budget)
    assert idx == count
    return out


def sweep_utilities(
    base_scores: np.ndarray,
    candidates: np.ndarray,
    caps: np.ndarray,
    rank: np.ndarray,
    budget: int,
    marginals: np.ndarray,
) -> np.ndarray:
    """Utility of the tally outcome for every candidate vote of a focal voter.

    For each candidate amounts row: add its expansion to ``base_scores``,
    select the top-``budget`` dollars under the tie-break, and sum the
    ``marginals`` of the selected dollars. With 0/1 marginals equal to an
    ideal allocation's expansion this is the overlap utility of the outcome.
    """
    base_scores = np.asarray(base_scores, dtype=np.int64)
    candidates = np.asarray(candidates, dtype=np.int64)
    caps = np.asarray(caps, dtype=np.int64)
    marginals = np.asarray(marginals, dtype=np.int64)
    off = _offsets(caps)
    n_cand = len(candidates)
    utilities = np.empty(n_cand, dtype=np.int64)
    scores = base_scores.copy()
    for i in range(n_cand):
        for p in range(len(caps)):
            w = candidates[i, p]
            if w:
                scores[off[p] : off[p] + w] += 1
        picked = selection_keys(scores, rank)[:budget]
        utilities[i] = marginals[picked].sum()
        for p in range(len(caps)):
            w = candidates[i, p]
            if w:
                scores[off[p] : off[p] + w] -= 1
    return utilities
