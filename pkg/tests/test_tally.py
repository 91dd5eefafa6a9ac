import itertools
import random
from fractions import Fraction

import pytest

from pbvote.model import (
    Allocation,
    Ballot,
    ElectionConfig,
    KApprovalBallot,
    KnapsackBallot,
    ProjectSpec,
    SubprojectId,
    ValidationError,
)
from pbvote.tally import (
    balanced_budget_tally,
    deficit_augmented_tally,
    integral_knapsack_tally,
    kapproval_tally,
    knapsack_tally,
    score_ballots,
)


def approval(voter, *projects):
    return Ballot(voter, KApprovalBallot(frozenset(projects)))


def knapsack(voter, amounts, revenue=None):
    return Ballot(
        voter,
        KnapsackBallot(
            Allocation.of(amounts),
            None if revenue is None else Allocation.of(revenue),
        ),
    )


class TestScoreBallots:
    def test_three_voter_example(self, three_project_config, three_project_ballots):
        table = score_ballots(three_project_ballots, three_project_config)
        per = table.per_project(three_project_config)
        assert per["P1"] == [2, 2, 2, 1, 0]
        assert per["P2"] == [2, 2, 2, 2, 2]
        assert per["P3"] == [3, 2, 1, 1, 1, 1, 1, 1, 1, 1]

    def test_no_ballots_all_zero(self, three_project_config):
        per = score_ballots([], three_project_config).per_project(three_project_config)
        assert all(all(s == 0 for s in scores) for scores in per.values())

    def test_single_ballot_matches_expansion(self, three_project_config):
        ballots = [knapsack("v", {"P1": 2, "P3": 8})]
        per = score_ballots(ballots, three_project_config).per_project(three_project_config)
        assert per["P1"] == [1, 1, 0, 0, 0]
        assert per["P2"] == [0] * 5
        assert per["P3"] == [1] * 8 + [0, 0]

    def test_invalid_ballot_names_voter(self, three_project_config):
        with pytest.raises(ValidationError, match="bob"):
            score_ballots([knapsack("bob", {"P1": 1})], three_project_config)


class TestKnapsackTally:
    def test_three_voter_example(self, three_project_config, three_project_ballots):
        outcome = knapsack_tally(three_project_ballots, three_project_config)
        assert outcome.allocation == Allocation.of({"P1": 3, "P2": 5, "P3": 2})

    def test_unanimity(self, three_project_config):
        vote = {"P1": 5, "P2": 3, "P3": 2}
        ballots = [knapsack(f"v{i}", vote) for i in range(4)]
        outcome = knapsack_tally(ballots, three_project_config)
        assert outcome.allocation == Allocation.of(vote)

    def test_two_project_hand_enumeration(self):
        # per-dollar scores: p1 = (2, 2), p2 = (1, 1); top two are p1's
        config = ElectionConfig(
            projects=(ProjectSpec("p1", "p1", 2), ProjectSpec("p2", "p2", 2)), budget=2
        )
        ballots = [
            knapsack("v1", {"p1": 2}),
            knapsack("v2", {"p2": 2}),
            knapsack("v3", {"p1": 2}),
        ]
        outcome = knapsack_tally(ballots, config)
        assert outcome.allocation == Allocation.of({"p1": 2})

    def test_order_invariance(self, three_project_config, three_project_ballots):
        expected = knapsack_tally(three_project_ballots, three_project_config)
        for perm in itertools.permutations(three_project_ballots):
            assert knapsack_tally(list(perm), three_project_config) == expected

    def test_zero_ballots_tie_break_prefix(self, three_project_config):
        outcome = knapsack_tally([], three_project_config)
        assert outcome.allocation == Allocation.of({"P1": 5, "P2": 5})

    def test_score_monotone_in_added_ballot(self, three_project_config, three_project_ballots):
        before = score_ballots(three_project_ballots, three_project_config)
        extra = knapsack("D", {"P1": 5, "P2": 5})
        after = score_ballots(three_project_ballots + [extra], three_project_config)
        for t in range(1, 6):
            assert after.get(SubprojectId("P1", t)) >= before.get(SubprojectId("P1", t))
            assert after.get(SubprojectId("P2", t)) >= before.get(SubprojectId("P2", t))

    def test_outcome_is_enumerated_argmax(self):
        rng = random.Random(11)
        for _ in range(25):
            caps = [rng.randint(1, 4) for _ in range(rng.randint(2, 3))]
            total = sum(caps)
            budget = rng.randint(1, total)
            config = ElectionConfig(
                projects=tuple(
                    ProjectSpec(f"p{i}", f"p{i}", c) for i, c in enumerate(caps)
                ),
                budget=budget,
            )
            ballots = []
            for v in range(rng.randint(1, 4)):
                amounts = {}
                remaining = budget
                for i, cap in enumerate(caps):
                    take = rng.randint(0, min(cap, remaining))
                    amounts[f"p{i}"] = take
                    remaining -= take
                if remaining:
                    continue
                ballots.append(knapsack(f"v{v}", amounts))
            table = score_ballots(ballots, config)
            outcome = knapsack_tally(ballots, config)

            def expansion_score(amounts_row):
                return sum(
                    table.get(SubprojectId(f"p{i}", t))
                    for i, w in enumerate(amounts_row)
                    for t in range(1, w + 1)
                )

            best = max(
                expansion_score(row)
                for row in itertools.product(*(range(c + 1) for c in caps))
                if sum(row) == budget
            )
            got = expansion_score([outcome.allocation.get(f"p{i}") for i in range(len(caps))])
            assert got == best


class TestKApprovalTally:
    def test_single_minded_voters_fund_one_project(self, street_config):
        ballots = [approval(f"v{i}", "A") for i in range(5)]
        outcome = kapproval_tally(ballots, 1, street_config)
        assert outcome.funded_projects == ("A",)
        assert outcome.allocation == Allocation.of({"A": 300})

    def test_no_ballots_funds_by_tie_break(self, street_config):
        outcome = kapproval_tally([], None, street_config)
        assert outcome.funded_projects == ("A",)

    def test_skip_and_continue_greedy(self, approval_five_config):
        # approvals a:100, b:50, c:50, d:50, e:20; ties resolved e, d, c, b, a
        ballots = []
        counts = {"a": 100, "b": 50, "c": 50, "d": 50, "e": 20}
        i = 0
        for pid, n in counts.items():
            for _ in range(n):
                ballots.append(approval(f"v{i}", pid))
                i += 1
        outcome = kapproval_tally(ballots, 2, approval_five_config)
        assert outcome.funded_projects == ("a", "d", "c")
        assert outcome.allocation.total() == 400

    def test_cap_enforced(self, street_config):
        with pytest.raises(ValidationError, match="cap"):
            kapproval_tally([approval("v", "A", "B")], 1, street_config)


class TestIntegralTally:
    @pytest.fixture
    def integral_ballots(self):
        # approval scores a: 15, b: 11, c: 10
        ballots = []
        i = 0
        for pid, n in (("a", 15), ("b", 11), ("c", 10)):
            for _ in range(n):
                ballots.append(approval(f"v{i}", pid))
                i += 1
        return ballots

    def test_stops_at_first_non_fitting(self, integral_config, integral_ballots):
        outcome = integral_knapsack_tally(integral_ballots, integral_config)
        assert outcome.funded_projects == ("a", "b")
        assert outcome.allocation.total() == 4  # one dollar left unspent
        assert outcome.fractional is None

    def test_fractional_last_uses_whole_budget(self, integral_config, integral_ballots):
        outcome = integral_knapsack_tally(
            integral_ballots, integral_config, fractional_last=True
        )
        assert outcome.funded_projects == ("a", "b")
        assert outcome.fractional == ("c", Fraction(1, 3))
        assert outcome.allocation == Allocation.of({"a": 2, "b": 2, "c": 1})

    def test_single_project_exact_fit(self):
        config = ElectionConfig(projects=(ProjectSpec("x", "x", 4),), budget=4)
        outcome = integral_knapsack_tally([approval("v", "x")], config, fractional_last=True)
        assert outcome.funded_projects == ("x",)
        assert outcome.fractional is None

    def test_vote_over_budget_rejected(self, integral_config):
        with pytest.raises(ValidationError, match="budget"):
            integral_knapsack_tally([approval("v", "a", "b", "c")], integral_config)


def balanced_config():
    return ElectionConfig(
        projects=(
            ProjectSpec("e1", "e1", 1),
            ProjectSpec("e2", "e2", 1),
            ProjectSpec("r", "r", 2, kind="revenue"),
        ),
        mode="balanced-budget",
    )


def brute_force_balanced(ballots, config):
    """Enumerate all equal-size (expenditure, revenue) pairs.

    Returns (max_total, argmax) where argmax lists every
    (size, exp_row, rev_row) attaining the maximum summed score.
    """
    payloads = [b.payload for b in ballots]
    n = len(payloads)
    exp = config.expenditure_layout
    rev = config.revenue_layout

    def exp_score(pid, t):
        return sum(1 for p in payloads if p.allocation.get(pid) >= t)

    def rev_score(pid, t):
        return sum(1 for p in payloads if (p.revenue_allocation or Allocation()).get(pid) >= t) - n

    def rows(layout, size):
        return [
            row
            for row in itertools.product(*(range(c + 1) for c in layout.caps))
            if sum(row) == size
        ]

    scored = []
    for size in range(0, min(exp.size, rev.size) + 1):
        for e_row in rows(exp, size):
            e_total = sum(
                exp_score(pid, t)
                for pid, w in zip(exp.project_ids, e_row)
                for t in range(1, w + 1)
            )
            for r_row in rows(rev, size):
                r_total = sum(
                    rev_score(pid, t)
                    for pid, w in zip(rev.project_ids, r_row)
                    for t in range(1, w + 1)
                )
                scored.append((e_total + r_total, size, e_row, r_row))
    max_total = max(s[0] for s in scored)
    argmax = [(size, e, r) for total, size, e, r in scored if total == max_total]
    return max_total, argmax


class TestBalancedTally:
    def test_single_voter_gets_her_ballot(self):
        config = balanced_config()
        ballots = [knapsack("v", {"e1": 1, "e2": 1}, revenue={"r": 2})]
        outcome = balanced_budget_tally(ballots, config)
        assert outcome.allocation == Allocation.of({"e1": 1, "e2": 1})
        assert outcome.revenue_allocation == Allocation.of({"r": 2})

    def test_zero_voters_maximal_size(self):
        # all scores zero: every size ties at 0 and the larger set wins
        config = balanced_config()
        outcome = balanced_budget_tally([], config)
        assert outcome.allocation.total() == 2
        assert outcome.revenue_allocation.total() == 2

    def test_matches_exhaustive_enumeration(self):
        config = balanced_config()
        ballots = [
            knapsack("v1", {"e1": 1, "e2": 1}, revenue={"r": 2}),
            knapsack("v2", {"e1": 1}, revenue={"r": 1}),
        ]
        outcome = balanced_budget_tally(ballots, config)
        max_total, argmax = brute_force_balanced(ballots, config)
        # scores tie at sizes 1 and 2; the larger pair wins, and at size 2
        # the argmax rows are unique
        biggest = max(size for size, _, _ in argmax)
        assert outcome.allocation.total() == biggest == 2
        rows = [(e, r) for size, e, r in argmax if size == biggest]
        assert rows == [((1, 1), (2,))]
        assert outcome.allocation == config.expenditure_layout.allocation(rows[0][0])
        assert outcome.revenue_allocation == config.revenue_layout.allocation(rows[0][1])

    def test_unbalanced_ballot_rejected(self):
        config = balanced_config()
        with pytest.raises(ValidationError, match="revenue total"):
            balanced_budget_tally([knapsack("v", {"e1": 1}, revenue={"r": 2})], config)

    def test_random_instances_match_enumeration(self):
        rng = random.Random(3)
        for _ in range(20):
            config = balanced_config()
            ballots = []
            for v in range(rng.randint(0, 3)):
                size = rng.randint(0, 2)
                exp_amounts = {"e1": 0, "e2": 0}
                for _ in range(size):
                    pid = rng.choice(["e1", "e2"])
                    if exp_amounts[pid] < 1:
                        exp_amounts[pid] += 1
                total = sum(exp_amounts.values())
                ballots.append(knapsack(f"v{v}", exp_amounts, revenue={"r": total}))
            outcome = balanced_budget_tally(ballots, config)
            max_total, argmax = brute_force_balanced(ballots, config)
            got_total = sum(
                sum(
                    1
                    for b in ballots
                    if b.payload.allocation.get(pid) >= t
                )
                for pid, w in outcome.allocation.amounts
                for t in range(1, w + 1)
            ) + sum(
                sum(
                    1
                    for b in ballots
                    if (b.payload.revenue_allocation or Allocation()).get(pid) >= t
                )
                - len(ballots)
                for pid, w in (outcome.revenue_allocation or Allocation()).amounts
                for t in range(1, w + 1)
            )
            assert got_total == max_total
            assert outcome.allocation.total() == max(size for size, _, _ in argmax)


class TestDeficitTally:
    def deficit_config(self):
        return ElectionConfig(
            projects=(
                ProjectSpec("x", "x", 2),
                ProjectSpec("y", "y", 2),
                ProjectSpec("r", "r", 2, kind="revenue"),
            ),
            mode="deficit-augmented",
        )

    def test_balanced_voters_keep_zero_deficit(self):
        config = self.deficit_config()
        ballots = [
            knapsack("v1", {"x": 2}, revenue={"r": 2}),
            knapsack("v2", {"x": 1, "y": 1}, revenue={"r": 2}),
        ]
        outcome = deficit_augmented_tally(ballots, config)
        assert outcome.deficit == 0

    def test_single_voter_deficit_reproduced(self):
        config = self.deficit_config()
        ballots = [knapsack("v", {"x": 2}, revenue={})]
        outcome = deficit_augmented_tally(ballots, config)
        assert outcome.allocation == Allocation.of({"x": 2})
        assert outcome.deficit == 2
        assert outcome.revenue_allocation == Allocation.of({})

    def test_two_voters_against_enumeration(self):
        config = self.deficit_config()
        ballots = [
            knapsack("v1", {"x": 2}, revenue={"r": 2}),  # deficit 0
            knapsack("v2", {"y": 2}, revenue={}),  # deficit 2
        ]
        outcome = deficit_augmented_tally(ballots, config)
        # oracle: balanced enumeration over revenue = (r, synthetic deficit)
        aug_config = ElectionConfig(
            projects=(
                ProjectSpec("x", "x", 2),
                ProjectSpec("y", "y", 2),
                ProjectSpec("r", "r", 2, kind="revenue"),
                ProjectSpec("zz_deficit", "zz_deficit", 4, kind="revenue"),
            ),
            mode="balanced-budget",
        )
        aug_ballots = [
            knapsack("v1", {"x": 2}, revenue={"r": 2, "zz_deficit": 0}),
            knapsack("v2", {"y": 2}, revenue={"zz_deficit": 2}),
        ]
        max_total, argmax = brute_force_balanced(aug_ballots, aug_config)
        biggest = max(size for size, _, _ in argmax)
        rows = [(e, r) for size, e, r in argmax if size == biggest]
        assert len(rows) == 1  # unambiguous at the winning size
        e_row, r_row = rows[0]
        assert outcome.allocation == aug_config.expenditure_layout.allocation(e_row)
        rev_alloc = aug_config.revenue_layout.allocation(r_row)
        assert (outcome.revenue_allocation or Allocation()).get("r") == rev_alloc.get("r")
        assert outcome.deficit == rev_alloc.get("zz_deficit")
