# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot per-dollar kernels.

Same contract as the pure fallback (see ``_kernels_py``): flat subproject
indexing in config order, int64 arrays, score vectors non-increasing
within each project.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "cython"


def _offsets(caps):
    out = np.zeros(len(caps), dtype=np.int64)
    np.cumsum(caps[:-1], out=out[1:])
    return out


def score_profile(ballots, caps):
    """Per-dollar inclusion counts: score[(p,t)] = #{v : ballots[v,p] >= t}."""
    cdef cnp.int64_t[:, :] b = np.ascontiguousarray(ballots, dtype=np.int64)
    cdef cnp.int64_t[:] c = np.ascontiguousarray(caps, dtype=np.int64)
    cdef Py_ssize_t n = b.shape[0], m = b.shape[1]
    cdef Py_ssize_t total = 0
    cdef Py_ssize_t p, v, t, off
    for p in range(m):
        total += c[p]
    scores_arr = np.zeros(total, dtype=np.int64)
    cdef cnp.int64_t[:] scores = scores_arr
    off = 0
    for p in range(m):
        for v in range(n):
            for t in range(b[v, p]):
                scores[off + t] += 1
        off += c[p]
    return scores_arr


cdef void _select(
    cnp.int64_t[:] scores,
    cnp.int64_t[:] rank,
    cnp.uint8_t[:] taken,
    Py_ssize_t budget,
    Py_ssize_t[:] picked,
) noexcept:
    """Greedy top-``budget`` by (score desc, rank asc) via repeated argmax."""
    cdef Py_ssize_t n = scores.shape[0]
    cdef Py_ssize_t i, j, best
    cdef cnp.int64_t best_score, best_rank
    for i in range(n):
        taken[i] = 0
    for j in range(budget):
        best = -1
        best_score = 0
        best_rank = 0
        for i in range(n):
            if taken[i]:
                continue
            if best < 0 or scores[i] > best_score or (
                scores[i] == best_score and rank[i] < best_rank
            ):
                best = i
                best_score = scores[i]
                best_rank = rank[i]
        taken[best] = 1
        picked[j] = best


def select_top(scores, rank, caps, budget):
    """Amounts vector of the top-``budget`` dollars by (score, tie-break)."""
    cdef cnp.int64_t[:] s = np.ascontiguousarray(scores, dtype=np.int64)
    cdef cnp.int64_t[:] r = np.ascontiguousarray(rank, dtype=np.int64)
    caps_arr = np.ascontiguousarray(caps, dtype=np.int64)
    cdef cnp.int64_t[:] c = caps_arr
    cdef Py_ssize_t bud = budget
    cdef Py_ssize_t m = c.shape[0]
    taken_arr = np.zeros(s.shape[0], dtype=np.uint8)
    picked_arr = np.zeros(bud, dtype=np.intp)
    cdef cnp.uint8_t[:] taken = taken_arr
    cdef Py_ssize_t[:] picked = picked_arr
    _select(s, r, taken, bud, picked)
    amounts_arr = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[:] amounts = amounts_arr
    cdef Py_ssize_t j, p, flat
    cdef Py_ssize_t off_end
    for j in range(bud):
        flat = picked[j]
        off_end = 0
        for p in range(m):
            off_end += c[p]
            if flat < off_end:
                amounts[p] += 1
                break
    return amounts_arr


def expand_amounts(amounts, caps):
    """0/1 per-dollar membership vector of an amounts vector."""
    cdef cnp.int64_t[:] a = np.ascontiguousarray(amounts, dtype=np.int64)
    cdef cnp.int64_t[:] c = np.ascontiguousarray(caps, dtype=np.int64)
    cdef Py_ssize_t m = c.shape[0]
    cdef Py_ssize_t total = 0
    cdef Py_ssize_t p, t, off
    for p in range(m):
        total += c[p]
    out_arr = np.zeros(total, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    off = 0
    for p in range(m):
        for t in range(a[p]):
            out[off + t] = 1
        off += c[p]
    return out_arr


def overlap_many(allocations, reference):
    """Overlap (sum of per-project minima) of each row with ``reference``."""
    cdef cnp.int64_t[:, :] rows = np.ascontiguousarray(allocations, dtype=np.int64)
    cdef cnp.int64_t[:] ref = np.ascontiguousarray(reference, dtype=np.int64)
    cdef Py_ssize_t n = rows.shape[0], m = rows.shape[1]
    out_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    cdef Py_ssize_t i, p
    cdef cnp.int64_t acc
    for i in range(n):
        acc = 0
        for p in range(m):
            acc += min(rows[i, p], ref[p])
        out[i] = acc
    return out_arr


def dot_expanded(scores, candidates, caps):
    """For each candidate amounts row, the score total of its expansion."""
    cdef cnp.int64_t[:] s = np.ascontiguousarray(scores, dtype=np.int64)
    cdef cnp.int64_t[:, :] cand = np.ascontiguousarray(candidates, dtype=np.int64)
    cdef cnp.int64_t[:] c = np.ascontiguousarray(caps, dtype=np.int64)
    cdef Py_ssize_t n = cand.shape[0], m = cand.shape[1]
    out_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    cdef Py_ssize_t i, p, t, off
    cdef cnp.int64_t acc
    for i in range(n):
        acc = 0
        off = 0
        for p in range(m):
            for t in range(cand[i, p]):
                acc += s[off + t]
            off += c[p]
        out[i] = acc
    return out_arr


def count_complete(caps, budget):
    """Exact count of capped amounts vectors summing to ``budget``."""
    ways = [1] + [0] * int(budget)
    for cap in caps:
        new = [0] * (int(budget) + 1)
        running = 0
        for b in range(int(budget) + 1):
            running += ways[b]
            if b - int(cap) - 1 >= 0:
                running -= ways[b - int(cap) - 1]
            new[b] = running
        ways = new
    return ways[int(budget)]


def enumerate_complete(caps, budget):
    """All amounts vectors summing to ``budget``, ascending lexicographic."""
    caps_arr = np.ascontiguousarray(caps, dtype=np.int64)
    cdef cnp.int64_t[:] c = caps_arr
    cdef Py_ssize_t m = c.shape[0]
    cdef Py_ssize_t count = count_complete(caps_arr, budget)
    out_arr = np.empty((count, m), dtype=np.int64)
    cdef cnp.int64_t[:, :] out = out_arr
    suffix_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[:] suffix = suffix_arr
    cdef Py_ssize_t p
    for p in range(m - 1, -1, -1):
        suffix[p] = suffix[p + 1] + c[p]
    row_arr = np.zeros(m, dtype=np.int64)
    rem_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[:] row = row_arr
    cdef cnp.int64_t[:] rem = rem_arr
    cdef Py_ssize_t idx = 0, depth = 0
    cdef cnp.int64_t lo, w
    rem[0] = budget
    # iterative DFS: at each depth try amounts from the feasibility floor up
    row[0] = -1
    while depth >= 0:
        if depth == m:
            for p in range(m):
                out[idx, p] = row[p]
            idx += 1
            depth -= 1
            continue
        lo = rem[depth] - suffix[depth + 1]
        if lo < 0:
            lo = 0
        if row[depth] < 0:
            w = lo
        else:
            w = row[depth] + 1
        if w > c[depth] or w > rem[depth]:
            row[depth] = -1
            depth -= 1
            continue
        row[depth] = w
        rem[depth + 1] = rem[depth] - w
        depth += 1
        if depth < m:
            row[depth] = -1
    return out_arr


def sweep_utilities(base_scores, candidates, caps, rank, budget, marginals):
    """Utility of the tally outcome for every candidate vote of a focal voter.

    Adds each candidate's expansion to the base scores, selects the top
    ``budget`` dollars under the tie-break, and sums the selected dollars'
    ``marginals``.
    """
    cdef cnp.int64_t[:] base = np.ascontiguousarray(base_scores, dtype=np.int64)
    cdef cnp.int64_t[:, :] cand = np.ascontiguousarray(candidates, dtype=np.int64)
    cdef cnp.int64_t[:] c = np.ascontiguousarray(caps, dtype=np.int64)
    cdef cnp.int64_t[:] r = np.ascontiguousarray(rank, dtype=np.int64)
    cdef cnp.int64_t[:] marg = np.ascontiguousarray(marginals, dtype=np.int64)
    cdef Py_ssize_t bud = budget
    cdef Py_ssize_t n = cand.shape[0], m = cand.shape[1]
    cdef Py_ssize_t size = base.shape[0]
    scores_arr = np.array(base_scores, dtype=np.int64, copy=True)
    cdef cnp.int64_t[:] scores = scores_arr
    taken_arr = np.zeros(size, dtype=np.uint8)
    picked_arr = np.zeros(bud, dtype=np.intp)
    cdef cnp.uint8_t[:] taken = taken_arr
    cdef Py_ssize_t[:] picked = picked_arr
    out_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    cdef Py_ssize_t i, p, t, j, off
    cdef cnp.int64_t acc
    for i in range(n):
        off = 0
        for p in range(m):
            for t in range(cand[i, p]):
                scores[off + t] += 1
            off += c[p]
        _select(scores, r, taken, bud, picked)
        acc = 0
        for j in range(bud):
            acc += marg[picked[j]]
        out[i] = acc
        off = 0
        for p in range(m):
            for t in range(cand[i, p]):
                scores[off + t] -= 1
            off += c[p]
    return out_arr
