"""Seeded synthetic elections, profiles, and utility models.

Everything here is deterministic under its seed so that brute-force
verification runs and demo pipelines are reproducible; reports quote the
seed they were generated from.
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence

from .comparisons import assign_pairs
from .model import (
    BALANCED_BUDGET,
    Allocation,
    Ballot,
    Comparison,
    ElectionConfig,
    EXPENDITURE,
    KApprovalBallot,
    KnapsackBallot,
    PairwiseBallot,
    ProjectSpec,
    RankingBallot,
    REVENUE,
)
from .utility import UtilityModel


def derive_rng(seed: int, *labels) -> random.Random:
    digest = hashlib.sha256("|".join([str(seed), *map(str, labels)]).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _count_table(caps: Sequence[int], budget: int) -> list[list[int]]:
    """ways[i][b] = number of capped vectors over projects i.. summing to b."""
    m = len(caps)
    ways = [[0] * (budget + 1) for _ in range(m + 1)]
    ways[m][0] = 1
    for i in range(m - 1, -1, -1):
        for b in range(budget + 1):
            ways[i][b] = sum(ways[i + 1][b - w] for w in range(0, min(caps[i], b) + 1))
    return ways


def sample_complete_allocation(
    caps: Sequence[int], budget: int, rng: random.Random
) -> list[int]:
    """Exactly uniform draw over all capped vectors summing to ``budget``,
    by unranking against the stars-and-bars count table."""
    ways = _count_table(caps, budget)
    if ways[0][budget] == 0:
        raise ValueError("no allocation satisfies the caps and budget")
    amounts = []
    remaining = budget
    for i, cap in enumerate(caps):
        pick = rng.randrange(ways[i][remaining])
        acc = 0
        for w in range(0, min(cap, remaining) + 1):
            acc += ways[i + 1][remaining - w]
            if pick < acc:
                amounts.append(w)
                remaining -= w
                break
    return amounts


def random_fixed_config(
    rng: random.Random,
    *,
    max_subprojects: int = 12,
    min_projects: int = 2,
    max_projects: int = 4,
    max_cap: int = 5,
) -> ElectionConfig:
    """Small fixed-budget election with 0 < budget < total capacity."""
    while True:
        m = rng.randint(min_projects, max_projects)
        caps = [rng.randint(1, max_cap) for _ in range(m)]
        total = sum(caps)
        if total <= max_subprojects and total >= 2:
            break
    budget = rng.randint(1, total - 1)
    projects = tuple(
        ProjectSpec(id=f"p{i + 1}", name=f"Project {i + 1}", cost=c) for i, c in enumerate(caps)
    )
    return ElectionConfig(projects=projects, budget=budget)


def random_complete_allocation(config: ElectionConfig, rng: random.Random) -> Allocation:
    layout = config.expenditure_layout
    amounts = sample_complete_allocation(list(layout.caps), config.budget, rng)
    return layout.allocation(amounts)


def random_knapsack_profile(
    config: ElectionConfig, rng: random.Random, n_voters: int
) -> list[Ballot]:
    return [
        Ballot(f"v{i + 1}", KnapsackBallot(random_complete_allocation(config, rng)))
        for i in range(n_voters)
    ]


def random_balanced_config(
    rng: random.Random, *, max_subprojects: int = 10
) -> ElectionConfig:
    while True:
        n_exp = rng.randint(1, 2)
        n_rev = rng.randint(1, 2)
        exp_caps = [rng.randint(1, 3) for _ in range(n_exp)]
        rev_caps = [rng.randint(1, 3) for _ in range(n_rev)]
        if sum(exp_caps) + sum(rev_caps) <= max_subprojects:
            break
    projects = tuple(
        [
            ProjectSpec(id=f"e{i + 1}", name=f"Expense {i + 1}", cost=c, kind=EXPENDITURE)
            for i, c in enumerate(exp_caps)
        ]
        + [
            ProjectSpec(id=f"r{i + 1}", name=f"Revenue {i + 1}", cost=c, kind=REVENUE)
            for i, c in enumerate(rev_caps)
        ]
    )
    return ElectionConfig(projects=projects, mode=BALANCED_BUDGET)


def random_balanced_vote(config: ElectionConfig, rng: random.Random) -> KnapsackBallot:
    exp_layout, rev_layout = config.expenditure_layout, config.revenue_layout
    size = rng.randint(0, min(exp_layout.size, rev_layout.size))
    exp = sample_complete_allocation(list(exp_layout.caps), size, rng)
    rev = sample_complete_allocation(list(rev_layout.caps), size, rng)
    return KnapsackBallot(
        allocation=exp_layout.allocation(exp), revenue_allocation=rev_layout.allocation(rev)
    )


def random_marginals(config: ElectionConfig, rng: random.Random, *, max_value: int = 9):
    """Integer per-dollar marginal values, non-increasing within a project."""
    marginals = {}
    for p in config.projects:
        values = sorted((rng.randint(0, max_value) for _ in range(p.cost)), reverse=True)
        marginals[p.id] = tuple(values)
    return UtilityModel.additive(marginals)


# --- demo pipeline: cost-insensitive approval voters ------------------------


def cost_bias_election(
    seed: int,
    *,
    n_voters: int = 40,
    k: int = 4,
    pairs_per_voter: int = 6,
    ranking_length: int = 4,
) -> tuple[ElectionConfig, list[Ballot], int]:
    """Synthetic election where approval voters ignore costs.

    Voters hold per-dollar values that favor cheap projects, but approve
    the projects with the largest headline (total) value, which skews
    approval ballots toward expensive projects. Knapsack, pairwise and
    ranking ballots follow the per-dollar values. Returns (config, mixed
    ballot log covering all four formats, approval cap).
    """
    costs = [30, 25, 20, 15, 6, 5, 4, 3]
    density = [0.5, 0.6, 0.7, 0.8, 1.6, 1.8, 2.0, 2.2]
    projects = tuple(
        ProjectSpec(id=f"p{i + 1}", name=f"Project {i + 1}", cost=c)
        for i, c in enumerate(costs)
    )
    config = ElectionConfig(projects=projects, budget=40)
    ids = [p.id for p in projects]
    ballots: list[Ballot] = []
    for v in range(n_voters):
        rng = derive_rng(seed, "voter", v)
        values = {
            pid: density[i] * rng.uniform(0.8, 1.25) for i, pid in enumerate(ids)
        }
        # knapsack: fill by per-dollar value until the budget is used up
        remaining = config.budget
        amounts: dict[str, int] = {}
        for pid in sorted(ids, key=lambda p: -values[p]):
            if remaining == 0:
                break
            take = min(config.project(pid).cost, remaining)
            amounts[pid] = take
            remaining -= take
        ballots.append(Ballot(f"v{v + 1}", KnapsackBallot(Allocation.of(amounts))))
        # approval: top-k by headline value, blind to cost
        headline = {pid: values[pid] * config.project(pid).cost for pid in ids}
        approved = sorted(ids, key=lambda p: -headline[p])[:k]
        ballots.append(Ballot(f"v{v + 1}", KApprovalBallot(frozenset(approved))))
        # pairwise: per-dollar comparisons on assigned pairs
        comparisons = tuple(
            Comparison(pair=pair, winner=max(pair, key=lambda p: values[p]))
            for pair in assign_pairs(ids, f"v{v + 1}", pairs_per_voter, seed)
        )
        ballots.append(Ballot(f"v{v + 1}", PairwiseBallot(comparisons)))
        # ranking: top projects by value for money
        ranked = tuple(sorted(ids, key=lambda p: -values[p])[:ranking_length])
        ballots.append(Ballot(f"v{v + 1}", RankingBallot(ranked)))
    return config, ballots, k
