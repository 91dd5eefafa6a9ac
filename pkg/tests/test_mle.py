import math
import random
from collections import Counter

import pytest

from pbvote.mle import (
    NoiseModel,
    count_up_to,
    enumerate_up_to,
    mle_estimate,
    sample_vote,
    total_overlap,
)
from pbvote.model import (
    Allocation,
    Ballot,
    ElectionConfig,
    EnumerationLimitError,
    KnapsackBallot,
    ProjectSpec,
    ValidationError,
)
from pbvote.synth import derive_rng, random_complete_allocation, random_fixed_config
from pbvote.tally import knapsack_tally


def two_by_two() -> tuple[ElectionConfig, NoiseModel]:
    config = ElectionConfig(
        projects=(ProjectSpec("x", "x", 2), ProjectSpec("y", "y", 2)), budget=2
    )
    model = NoiseModel(config=config, ground_truth=Allocation.of({"x": 1, "y": 1}))
    return config, model


class TestSampler:
    def test_support_counts_all_sets_up_to_budget(self):
        config, model = two_by_two()
        # (0,0) (1,0) (0,1) (2,0) (1,1) (0,2)
        assert model.support_size() == 6
        assert count_up_to([2, 2], 2) == 6

    def test_ground_truth_is_most_frequent(self):
        _, model = two_by_two()
        rng = random.Random(0)
        counts = Counter(sample_vote(model, rng).as_dict().__str__() for _ in range(20_000))
        assert counts[str(Allocation.of({"x": 1, "y": 1}).as_dict())] == max(counts.values())

    def test_equal_overlap_sets_equally_frequent(self):
        _, model = two_by_two()
        rng = random.Random(1)
        draws = 100_000
        counts = Counter()
        for _ in range(draws):
            counts[tuple(sorted(sample_vote(model, rng).amounts))] += 1
        # the four overlap-1 singleton-ish sets share one probability
        keys = [(("x", 1),), (("y", 1),), (("x", 2),), (("y", 2),)]
        p = math.e / (1 + 4 * math.e + math.e**2)
        sigma = math.sqrt(draws * p * (1 - p))
        for key in keys:
            assert abs(counts[key] - draws * p) < 3 * sigma

    def test_probability_ratio_between_adjacent_overlaps_is_e(self):
        _, model = two_by_two()
        rng = random.Random(2)
        draws = 100_000
        counts = Counter()
        for _ in range(draws):
            counts[tuple(sorted(sample_vote(model, rng).amounts))] += 1
        top = counts[(("x", 1), ("y", 1))]
        near = [counts[k] for k in [(("x", 1),), (("y", 1),), (("x", 2),), (("y", 2),)]]
        ratio = top / (sum(near) / len(near))
        assert abs(ratio - math.e) / math.e < 0.05

    def test_exact_probability_accessor(self):
        _, model = two_by_two()
        z = 1 + 4 * math.e + math.e**2
        assert model.probability(Allocation.of({"x": 1, "y": 1})) == pytest.approx(
            math.e**2 / z
        )

    def test_incomplete_ground_truth_rejected(self):
        config, _ = two_by_two()
        with pytest.raises(ValidationError):
            NoiseModel(config=config, ground_truth=Allocation.of({"x": 1}))

    def test_oversized_support_refused(self):
        config = ElectionConfig(
            projects=tuple(ProjectSpec(f"p{i}", f"p{i}", 6) for i in range(8)), budget=24
        )
        with pytest.raises(EnumerationLimitError):
            enumerate_up_to(config, limit=1000)


class TestMleEstimate:
    def test_unanimous_votes_recover_truth(self):
        config, model = two_by_two()
        truth = Allocation.of({"x": 1, "y": 1})
        votes = [truth] * 5
        assert mle_estimate(votes, config) == truth

    def test_three_voter_example(self, three_project_config, three_project_ballots):
        votes = [b.payload.allocation for b in three_project_ballots]
        estimate = mle_estimate(votes, three_project_config)
        assert estimate == Allocation.of({"P1": 3, "P2": 5, "P3": 2})
        assert estimate == knapsack_tally(three_project_ballots, three_project_config).allocation

    def test_matches_tally_score_on_sampled_profiles(self):
        # summed per-dollar score of a complete set equals its total overlap
        # with the votes, so the tally greedy and the enumerated argmax must
        # agree on that value even when they differ within a tie class
        for trial in range(60):
            rng = derive_rng(991, "mle-test", trial)
            config = random_fixed_config(rng, max_subprojects=8, max_projects=3, max_cap=4)
            truth = random_complete_allocation(config, rng)
            model = NoiseModel(config=config, ground_truth=truth)
            votes = [sample_vote(model, rng) for _ in range(rng.randint(1, 6))]
            estimate = mle_estimate(votes, config)
            ballots = [Ballot(f"v{i}", KnapsackBallot(v)) for i, v in enumerate(votes)]
            tally_outcome = knapsack_tally(ballots, config, allow_underfull=True)
            assert total_overlap(estimate, votes) == total_overlap(
                tally_outcome.allocation, votes
            )

    def test_recovery_rate_with_many_samples(self):
        recovered = 0
        trials = 40
        for trial in range(trials):
            rng = derive_rng(77, "recovery", trial)
            config = random_fixed_config(rng, max_subprojects=10, max_projects=3, max_cap=4)
            truth = random_complete_allocation(config, rng)
            model = NoiseModel(config=config, ground_truth=truth)
            votes = [sample_vote(model, rng) for _ in range(200)]
            if mle_estimate(votes, config) == truth:
                recovered += 1
        assert recovered >= 0.95 * trials
