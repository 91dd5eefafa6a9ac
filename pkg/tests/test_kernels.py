"""Parity between the compiled kernels and the pure fallback, plus oracles
for the selection and enumeration primitives."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbvote import _kernels_py as pure

try:
    from pbvote import _kernels as compiled
except ImportError:
    compiled = None

IMPLS = [pure] + ([compiled] if compiled is not None else [])


def brute_force_enumerate(caps, budget):
    rows = [
        row
        for row in itertools.product(*(range(c + 1) for c in caps))
        if sum(row) == budget
    ]
    return sorted(rows)


@pytest.fixture(params=IMPLS, ids=lambda m: m.IMPLEMENTATION)
def impl(request):
    return request.param


profile_strategy = st.integers(min_value=1, max_value=4).flatmap(
    lambda m: st.tuples(
        st.lists(st.integers(min_value=1, max_value=5), min_size=m, max_size=m),
        st.integers(min_value=0, max_value=5),
    )
)


class TestScoreProfile:
    def test_counts_inclusion_per_dollar(self, impl):
        ballots = np.array([[2, 0], [1, 1], [2, 1]], dtype=np.int64)
        caps = np.array([2, 2], dtype=np.int64)
        assert impl.score_profile(ballots, caps).tolist() == [3, 2, 2, 0]

    def test_empty_profile(self, impl):
        scores = impl.score_profile(np.zeros((0, 2), dtype=np.int64), np.array([2, 1]))
        assert scores.tolist() == [0, 0, 0]


class TestSelectTop:
    def test_tie_break_prefers_lower_rank(self, impl):
        scores = np.array([1, 1, 1, 0], dtype=np.int64)
        rank = np.array([2, 3, 0, 1], dtype=np.int64)  # third dollar first in order
        caps = np.array([2, 2], dtype=np.int64)
        # picks flat ids 2 (rank 0) then 0 (rank 2)
        assert impl.select_top(scores, rank, caps, 2).tolist() == [1, 1]

    def test_matches_brute_force_argmax(self, impl):
        def expansion_score(scores, caps, amounts):
            off = 0
            total = 0
            for cap, w in zip(caps, amounts):
                total += int(scores[off : off + w].sum())
                off += cap
            return total

        rng = np.random.default_rng(7)
        for _ in range(50):
            caps = rng.integers(1, 4, size=rng.integers(1, 4)).astype(np.int64)
            total = int(caps.sum())
            budget = int(rng.integers(0, total + 1))
            scores = rng.integers(0, 4, size=total).astype(np.int64)
            # force per-project non-increasing scores (consistent profiles)
            off = 0
            for c in caps:
                scores[off : off + c] = -np.sort(-scores[off : off + c])
                off += c
            rank = np.arange(total, dtype=np.int64)
            amounts = impl.select_top(scores, rank, caps, budget)
            oracle = max(
                expansion_score(scores, caps, row)
                for row in brute_force_enumerate(list(caps), budget)
            )
            assert amounts.sum() == budget
            assert expansion_score(scores, caps, amounts) == oracle


class TestEnumerate:
    def test_small_cases(self, impl):
        assert impl.enumerate_complete(np.array([1, 1]), 1).tolist() == [[0, 1], [1, 0]]
        assert impl.enumerate_complete(np.array([2, 2]), 2).tolist() == [
            [0, 2],
            [1, 1],
            [2, 0],
        ]

    def test_against_brute_force(self, impl):
        for caps, budget in [([5, 5, 10], 10), ([3, 2], 4), ([1, 1, 1, 1], 2), ([4], 4)]:
            got = impl.enumerate_complete(np.array(caps, dtype=np.int64), budget)
            assert [tuple(r) for r in got.tolist()] == brute_force_enumerate(caps, budget)
            assert impl.count_complete(np.array(caps, dtype=np.int64), budget) == len(got)

    def test_example_count_is_36(self, impl):
        assert impl.count_complete(np.array([5, 5, 10], dtype=np.int64), 10) == 36


@pytest.mark.skipif(compiled is None, reason="compiled kernels unavailable")
class TestParity:
    @settings(max_examples=60, deadline=None)
    @given(profile_strategy, st.integers(min_value=0, max_value=2**32 - 1))
    def test_full_pipeline_parity(self, caps_nvoters, seed):
        caps_list, n_voters = caps_nvoters
        caps = np.array(caps_list, dtype=np.int64)
        total = int(caps.sum())
        rng = np.random.default_rng(seed)
        budget = int(rng.integers(0, total + 1))
        ballots = np.stack(
            [
                np.array(
                    [rng.integers(0, c + 1) for c in caps_list], dtype=np.int64
                )
                for _ in range(n_voters)
            ]
        ) if n_voters else np.zeros((0, len(caps_list)), dtype=np.int64)
        rank = rng.permutation(total).astype(np.int64)
        # make rank consistent per project: sort rank ascending within project
        off = 0
        for c in caps_list:
            rank[off : off + c] = np.sort(rank[off : off + c])
            off += c
        s1 = pure.score_profile(ballots, caps)
        s2 = compiled.score_profile(ballots, caps)
        assert s1.tolist() == s2.tolist()
        assert (
            pure.select_top(s1, rank, caps, budget).tolist()
            == compiled.select_top(s2, rank, caps, budget).tolist()
        )
        cand1 = pure.enumerate_complete(caps, budget)
        cand2 = compiled.enumerate_complete(caps, budget)
        assert cand1.tolist() == cand2.tolist()
        marginals = rng.integers(0, 5, size=total).astype(np.int64)
        off = 0
        for c in caps_list:
            marginals[off : off + c] = -np.sort(-marginals[off : off + c])
            off += c
        u1 = pure.sweep_utilities(s1, cand1, caps, rank, budget, marginals)
        u2 = compiled.sweep_utilities(s2, cand2, caps, rank, budget, marginals)
        assert u1.tolist() == u2.tolist()
        d1 = pure.dot_expanded(s1, cand1, caps)
        d2 = compiled.dot_expanded(s2, cand2, caps)
        assert d1.tolist() == d2.tolist()
        ref = cand1[0] if len(cand1) else np.zeros(len(caps_list), dtype=np.int64)
        assert (
            pure.overlap_many(cand1, ref).tolist() == compiled.overlap_many(cand2, ref).tolist()
        )
        assert (
            pure.expand_amounts(ref, caps).tolist() == compiled.expand_amounts(ref, caps).tolist()
        )


def test_env_override_selects_pure(monkeypatch):
    import importlib

    import pbvote.kernels as kernels_module

    monkeypatch.setenv("PBVOTE_PURE", "1")
    reloaded = importlib.reload(kernels_module)
    assert reloaded.IMPLEMENTATION == "python"
    monkeypatch.delenv("PBVOTE_PURE")
    importlib.reload(kernels_module)
