import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest

from pbvote.comparisons import (
    ComparisonMatrix,
    agreement_report,
    assign_pairs,
    majority_order,
    matrix_from_ballots,
    ranking_to_knapsack,
    record_comparison,
    set_borda_score,
)
from pbvote.model import (
    Allocation,
    Ballot,
    Comparison,
    PairwiseBallot,
    RankingBallot,
    UndefinedScoreError,
    ValidationError,
)


def matrix_of(projects, *entries):
    m = ComparisonMatrix.empty(projects)
    for j, k, count in entries:
        for _ in range(count):
            m = record_comparison(m, "v", (j, k), j)
    return m


class TestRecordComparison:
    def test_single_comparison(self):
        m = matrix_of(["j", "k"], ("j", "k", 1))
        assert m.n("j", "k") == 1
        assert m.n("k", "j") == 0

    def test_opposite_ways(self):
        m = matrix_of(["j", "k"], ("j", "k", 1), ("k", "j", 1))
        assert m.n("j", "k") == 1
        assert m.n("k", "j") == 1

    def test_fraction_for_winner(self):
        m = matrix_of(["j", "k"], ("j", "k", 2), ("k", "j", 1))
        assert Fraction(m.n("j", "k"), m.n("j", "k") + m.n("k", "j")) == Fraction(2, 3)

    def test_total_preserved(self):
        m = matrix_of(["a", "b", "c"], ("a", "b", 3), ("c", "b", 2), ("b", "a", 1))
        assert m.total_comparisons() == 6

    def test_winner_must_be_in_pair(self):
        m = ComparisonMatrix.empty(["a", "b", "c"])
        with pytest.raises(ValidationError):
            record_comparison(m, "v", ("a", "b"), "c")

    def test_json_round_trip(self):
        m = matrix_of(["a", "b"], ("a", "b", 2))
        again = ComparisonMatrix.from_json_dict(m.to_json_dict())
        assert again.n("a", "b") == 2 and again.projects == ("a", "b")


class TestMajorityOrder:
    def test_total_order_recovered(self):
        m = matrix_of(
            ["a", "b", "c"], ("a", "b", 2), ("b", "a", 1), ("a", "c", 2), ("c", "a", 1),
            ("b", "c", 2), ("c", "b", 1),
        )
        order, transitive = majority_order(m)
        assert order == ("a", "b", "c")
        assert transitive

    def test_cycle_falls_back_to_copeland(self):
        m = matrix_of(
            ["r", "p", "s"], ("r", "s", 2), ("s", "r", 1), ("s", "p", 2), ("p", "s", 1),
            ("p", "r", 2), ("r", "p", 1),
        )
        order, transitive = majority_order(m)
        assert not transitive
        assert set(order) == {"r", "p", "s"}

    def test_empty_matrix_uses_tie_break(self):
        m = ComparisonMatrix.empty(["b", "a"])
        order, transitive = majority_order(m, tie_break_projects=["a", "b"])
        assert order == ("a", "b")
        assert transitive is False or transitive is True  # flag defined
        # vacuously transitive: no comparisons contradict the order
        assert transitive

    def test_recovers_random_ground_truth(self):
        rng = random.Random(42)
        for _ in range(20):
            truth = [f"p{i}" for i in range(rng.randint(3, 5))]
            rng.shuffle(truth)
            m = ComparisonMatrix.empty(sorted(truth))
            for j, k in itertools.combinations(range(len(truth)), 2):
                # majority 3-1 consistent with the ground-truth order
                winner, loser = truth[j], truth[k]
                for _ in range(3):
                    m = record_comparison(m, "v", (winner, loser), winner)
                m = record_comparison(m, "v", (winner, loser), loser)
            order, transitive = majority_order(m)
            assert transitive
            assert list(order) == truth


def borda_oracle(matrix, funded, costs):
    """Independent double-loop recomputation of the set score."""
    funded = set(funded)
    c_total = sum(costs[p] for p in funded)
    m_total = sum(costs.values())
    acc = 0
    for j in costs:
        for k in costs:
            if j in funded and k not in funded:
                acc += costs[j] * costs[k] * (matrix.n(j, k) - matrix.n(k, j))
    return Fraction(acc, c_total * (m_total - c_total))


class TestSetBorda:
    def test_symmetric_matrix_scores_zero(self):
        m = matrix_of(["a", "b", "c"], ("a", "b", 2), ("b", "a", 2), ("a", "c", 1), ("c", "a", 1))
        assert set_borda_score(m, {"a"}, {"a": 1, "b": 1, "c": 1}) == 0

    def test_direct_formula(self):
        m = matrix_of(["a", "b"], ("a", "b", 3), ("b", "a", 1))
        assert set_borda_score(m, {"a"}, {"a": 1, "b": 1}) == 2

    def test_empty_or_full_set_undefined(self):
        m = matrix_of(["a", "b"], ("a", "b", 1))
        costs = {"a": 1, "b": 1}
        with pytest.raises(UndefinedScoreError):
            set_borda_score(m, set(), costs)
        with pytest.raises(UndefinedScoreError):
            set_borda_score(m, {"a", "b"}, costs)

    def test_matches_double_loop_oracle(self):
        rng = random.Random(9)
        for _ in range(300):
            n_projects = rng.randint(2, 5)
            ids = [f"p{i}" for i in range(n_projects)]
            costs = {pid: rng.randint(1, 9) for pid in ids}
            m = ComparisonMatrix.empty(ids)
            for j, k in itertools.permutations(ids, 2):
                for _ in range(rng.randint(0, 3)):
                    m = record_comparison(m, "v", (j, k), j)
            size = rng.randint(1, n_projects - 1)
            funded = set(rng.sample(ids, size))
            assert set_borda_score(m, funded, costs) == borda_oracle(m, funded, costs)

    def test_complement_antisymmetry(self):
        rng = random.Random(10)
        ids = ["a", "b", "c", "d"]
        costs = {pid: rng.randint(1, 5) for pid in ids}
        m = ComparisonMatrix.empty(ids)
        for j, k in itertools.permutations(ids, 2):
            for _ in range(rng.randint(0, 2)):
                m = record_comparison(m, "v", (j, k), j)
        funded = {"a", "c"}
        complement = set(ids) - funded
        assert set_borda_score(m, funded, costs) == -set_borda_score(m, complement, costs)


class TestRankingToKnapsack:
    def test_greedy_fill_with_remainder(self, street_config):
        conv = ranking_to_knapsack(RankingBallot(("B", "C", "A")), street_config)
        assert conv.allocation == Allocation.of({"B": 200, "C": 100})
        assert not conv.underfull

    def test_first_choice_fills_budget(self, street_config):
        conv = ranking_to_knapsack(RankingBallot(("A", "B")), street_config)
        assert conv.allocation == Allocation.of({"A": 300})
        assert not conv.underfull

    def test_single_big_item(self, three_project_config):
        conv = ranking_to_knapsack(RankingBallot(("P3",)), three_project_config)
        assert conv.allocation == Allocation.of({"P3": 10})
        assert not conv.underfull

    def test_partial_fill_of_non_fitting_project(self, street_config):
        conv = ranking_to_knapsack(RankingBallot(("B", "A")), street_config)
        assert conv.allocation == Allocation.of({"B": 200, "A": 100})
        assert not conv.underfull

    def test_short_ranking_flagged_underfull(self, street_config):
        conv = ranking_to_knapsack(RankingBallot(("C",)), street_config)
        assert conv.allocation == Allocation.of({"C": 100})
        assert conv.underfull

    def test_duplicates_rejected(self, street_config):
        with pytest.raises(ValidationError):
            ranking_to_knapsack(RankingBallot(("A", "A")), street_config)


class TestAgreementReport:
    def test_identical_outcomes_identical_agreement(self):
        m = matrix_of(["a", "b", "c"], ("a", "b", 3), ("a", "c", 2), ("b", "c", 2))
        costs = {"a": 2, "b": 2, "c": 2}
        report = agreement_report(m, {"x": {"a"}, "y": {"a"}}, costs)
        assert report["methods"]["x"]["agreement"] == report["methods"]["y"]["agreement"]

    def test_zero_comparisons_refused(self):
        m = ComparisonMatrix.empty(["a", "b"])
        with pytest.raises(UndefinedScoreError):
            agreement_report(m, {"x": {"a"}}, {"a": 1, "b": 1})

    def test_aligned_outcome_scores_higher(self):
        # comparisons drawn from a clear order a > b > c > d
        m = matrix_of(
            ["a", "b", "c", "d"],
            ("a", "b", 4), ("a", "c", 4), ("a", "d", 4),
            ("b", "c", 4), ("b", "d", 4), ("c", "d", 4),
        )
        costs = {"a": 1, "b": 1, "c": 1, "d": 1}
        report = agreement_report(m, {"good": {"a", "b"}, "bad": {"c", "d"}}, costs)
        assert (
            report["methods"]["good"]["agreement_value"]
            > report["methods"]["bad"]["agreement_value"]
        )


class TestAssignPairs:
    def test_small_universe_gets_all_pairs(self):
        pairs = assign_pairs(["a", "b", "c"], "v", 3, seed=1)
        assert sorted(pairs) == [("a", "b"), ("a", "c"), ("b", "c")]

    def test_deterministic_per_seed_and_voter(self):
        a = assign_pairs(["a", "b", "c", "d"], "v9", 4, seed=7)
        b = assign_pairs(["a", "b", "c", "d"], "v9", 4, seed=7)
        assert a == b
        c = assign_pairs(["a", "b", "c", "d"], "other", 4, seed=7)
        assert set(a) != set(c) or a != c or True  # may coincide; only determinism is pinned

    def test_count_over_universe_rejected(self):
        with pytest.raises(ValidationError):
            assign_pairs(["a", "b"], "v", 2, seed=0)

    def test_roughly_uniform_over_many_voters(self):
        ids = ["a", "b", "c", "d", "e"]
        counts = Counter()
        draws = 10_000
        for i in range(draws):
            for pair in assign_pairs(ids, f"v{i}", 1, seed=3):
                counts[pair] += 1
        expected = draws / 10  # C(5,2) pairs
        for pair, n in counts.items():
            assert abs(n - expected) / expected < 0.10


def test_matrix_from_ballots_counts_all(three_project_config):
    ballots = [
        Ballot(
            "v1",
            PairwiseBallot(
                (
                    Comparison(("P1", "P2"), "P1"),
                    Comparison(("P2", "P3"), "P3"),
                )
            ),
        ),
        Ballot("v2", PairwiseBallot((Comparison(("P1", "P2"), "P2"),))),
    ]
    m = matrix_from_ballots(ballots, three_project_config)
    assert m.n("P1", "P2") == 1
    assert m.n("P2", "P1") == 1
    assert m.n("P3", "P2") == 1
    assert m.total_comparisons() == 3
