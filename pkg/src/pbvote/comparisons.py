"""Pairwise value-for-money comparisons and their aggregation.

Voters compare random project pairs by benefit per dollar. This module
accumulates those choices into a count matrix, extracts a (near-)majority
order, scores funded sets against the matrix with a cost-weighted Borda
generalization, converts ranking ballots into budget allocations, and
assigns comparison pairs deterministically per voter.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .model import (
    Allocation,
    Ballot,
    ElectionConfig,
    PairwiseBallot,
    RankingBallot,
    UndefinedScoreError,
    ValidationError,
)


@dataclass(frozen=True)
class ComparisonMatrix:
    """n[(j, k)] = number of voters that chose j over k. Missing cells are 0."""

    projects: tuple[str, ...]
    counts: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def n(self, j: str, k: str) -> int:
        if j == k:
            return 0
        return self.counts.get((j, k), 0)

    def total_comparisons(self) -> int:
        return sum(self.counts.values())

    def margin(self, j: str, k: str) -> int:
        return self.n(j, k) - self.n(k, j)

    def to_json_dict(self) -> dict:
        return {
            "projects": list(self.projects),
            "counts": {f"{j}>{k}": c for (j, k), c in sorted(self.counts.items()) if c},
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "ComparisonMatrix":
        counts = {}
        for key, c in data.get("counts", {}).items():
            j, _, k = key.partition(">")
            counts[(j, k)] = int(c)
        return ComparisonMatrix(tuple(data["projects"]), counts)

    @staticmethod
    def empty(projects: Iterable[str]) -> "ComparisonMatrix":
        return ComparisonMatrix(tuple(projects), {})


def record_comparison(
    matrix: ComparisonMatrix, voter_id: str, pair: tuple[str, str], winner: str
) -> ComparisonMatrix:
    """Return the matrix with one more vote of ``winner`` over the pair's
    other project. ``voter_id`` is accepted for audit symmetry; the count
    matrix itself is anonymous."""
    if winner not in pair:
        raise ValidationError(f"winner {winner!r} not in pair {pair}")
    j, k = pair
    if j == k:
        raise ValidationError("a comparison needs two distinct projects")
    for pid in pair:
        if pid not in matrix.projects:
            raise ValidationError(f"unknown project {pid!r}")
    loser = k if winner == j else j
    counts = dict(matrix.counts)
    counts[(winner, loser)] = counts.get((winner, loser), 0) + 1
    return ComparisonMatrix(matrix.projects, counts)


def matrix_from_ballots(ballots: Sequence[Ballot], config: ElectionConfig) -> ComparisonMatrix:
    matrix = ComparisonMatrix.empty(config.project_ids())
    for ballot in ballots:
        if isinstance(ballot.payload, PairwiseBallot):
            for comp in ballot.payload.comparisons:
                matrix = record_comparison(matrix, ballot.voter_id, comp.pair, comp.winner)
    return matrix


def majority_order(
    matrix: ComparisonMatrix, tie_break_projects: Sequence[str] | None = None
) -> tuple[tuple[str, ...], bool]:
    """Iteratively extract projects that beat every remaining project by
    strict majority.

    Returns (order, True) when that succeeds all the way down. When no such
    project exists at some step the remaining projects are ordered by wins
    minus losses instead (ties by the tie-break order) and the flag is
    False, marking the order as a documented fallback rather than a clean
    majority relation.
    """
    tie_order = list(tie_break_projects) if tie_break_projects else list(matrix.projects)
    pos = {pid: i for i, pid in enumerate(tie_order)}
    remaining = sorted(matrix.projects, key=pos.__getitem__)
    if matrix.total_comparisons() == 0:
        return tuple(remaining), True  # vacuously transitive
    order: list[str] = []
    while remaining:
        winner = None
        for j in remaining:
            if all(matrix.margin(j, k) > 0 for k in remaining if k != j):
                winner = j
                break
        if winner is None and len(remaining) == 1:
            winner = remaining[0]
        if winner is not None:
            order.append(winner)
            remaining.remove(winner)
            continue
        copeland = {
            j: sum(
                (1 if matrix.margin(j, k) > 0 else -1 if matrix.margin(j, k) < 0 else 0)
                for k in remaining
                if k != j
            )
            for j in remaining
        }
        order.extend(sorted(remaining, key=lambda j: (-copeland[j], pos[j])))
        return tuple(order), False
    return tuple(order), True


def set_borda_score(
    matrix: ComparisonMatrix, funded: Iterable[str], costs: Mapping[str, int]
) -> Fraction:
    """Cost-weighted agreement of a funded set with the comparison matrix.

    Every comparison of j over k counts as cost_j * cost_k dollar-versus-
    dollar agreements; the score is the normalized margin across the funded
    / unfunded cut: sum over j in S, k not in S of
    c_j * c_k * (n(j,k) - n(k,j)), divided by C * (M - C) with C the funded
    cost and M the total cost. Exact rational.
    """
    funded_set = set(funded)
    unknown = funded_set - set(costs)
    if unknown:
        raise ValidationError(f"funded set mentions unknown projects {sorted(unknown)}")
    outside = set(costs) - funded_set
    if not funded_set or not outside:
        raise UndefinedScoreError(
            "set-Borda score is undefined for an empty or all-project funded set"
        )
    funded_cost = sum(costs[p] for p in funded_set)
    total_cost = sum(costs.values())
    numerator = sum(
        costs[j] * costs[k] * (matrix.n(j, k) - matrix.n(k, j))
        for j in funded_set
        for k in outside
    )
    return Fraction(numerator, funded_cost * (total_cost - funded_cost))


@dataclass(frozen=True)
class RankingConversion:
    """A ranking ballot read as a budget allocation.

    ``underfull`` flags rankings too short to use up the whole budget.
    """

    allocation: Allocation
    underfull: bool


def ranking_to_knapsack(ranking: RankingBallot, config: ElectionConfig) -> RankingConversion:
    """Walk the ranking funding each project fully while it fits; the first
    project that does not fit gets all remaining budget; later ranks get 0."""
    if len(set(ranking.ranking)) != len(ranking.ranking):
        raise ValidationError("ranking repeats a project")
    remaining = config.budget
    amounts: dict[str, int] = {}
    for pid in ranking.ranking:
        cost = config.project(pid).cost
        if remaining == 0:
            break
        if cost <= remaining:
            amounts[pid] = cost
            remaining -= cost
        else:
            amounts[pid] = remaining
            remaining = 0
            break
    return RankingConversion(Allocation.of(amounts), underfull=remaining > 0)


def agreement_report(
    matrix: ComparisonMatrix,
    outcomes: Mapping[str, Iterable[str]],
    costs: Mapping[str, int],
) -> dict:
    """Per-method agreement with the comparison data.

    Agreement is the set-Borda score divided by the number of recorded
    comparisons, landing in [-1, 1]; the standard error is that of the
    sample mean of the per-comparison agreement contributions, treating the
    sample mean as normally distributed.
    """
    total = matrix.total_comparisons()
    if total == 0:
        raise UndefinedScoreError("no comparisons recorded; agreement is undefined")
    report: dict = {"comparisons": total, "methods": {}}
    for method, funded in sorted(outcomes.items()):
        funded_set = set(funded)
        score = set_borda_score(matrix, funded_set, costs)
        agreement = score / total
        funded_cost = sum(costs[p] for p in funded_set)
        denom = funded_cost * (sum(costs.values()) - funded_cost)
        # one observation per recorded comparison: its normalized contribution
        observations: list[float] = []
        for (j, k), count in matrix.counts.items():
            if j in funded_set and k not in funded_set:
                value = costs[j] * costs[k] / denom
            elif k in funded_set and j not in funded_set:
                value = -costs[j] * costs[k] / denom
            else:
                value = 0.0
            observations.extend([value] * count)
        mean = sum(observations) / total
        variance = sum((x - mean) ** 2 for x in observations) / (total - 1) if total > 1 else 0.0
        stderr = math.sqrt(variance / total)
        report["methods"][method] = {
            "agreement": f"{agreement.numerator}/{agreement.denominator}",
            "agreement_value": float(agreement),
            "standard_error": stderr,
            "funded": sorted(funded_set),
        }
    return report


def assign_pairs(
    project_ids: Sequence[str], voter_id: str, count: int, seed: int
) -> list[tuple[str, str]]:
    """``count`` distinct project pairs, uniform without replacement,
    deterministic per (seed, voter)."""
    all_pairs = list(combinations(sorted(project_ids), 2))
    if count > len(all_pairs):
        raise ValidationError(
            f"requested {count} pairs but only {len(all_pairs)} exist"
        )
    digest = hashlib.sha256(f"{seed}|{voter_id}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    return rng.sample(all_pairs, count)
