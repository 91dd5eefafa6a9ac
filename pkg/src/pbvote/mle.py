"""Noisy vote model and maximum-likelihood outcome estimation.

Votes are modeled as noisy observations of a ground-truth allocation: a
consistent dollar set S (of size at most the budget) is drawn with
probability proportional to exp(overlap(S, ground truth)). The
maximum-likelihood estimate of the ground truth given votes is then the
complete allocation maximizing the summed overlap with the votes, which
this module computes by exhaustive enumeration so it can be compared
against the per-dollar tally.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .model import (
    Allocation,
    ElectionConfig,
    EnumerationLimitError,
    FIXED_BUDGET,
    ValidationError,
)

DEFAULT_SUPPORT_LIMIT = 2_000_000


def count_up_to(caps, budget: int) -> int:
    """Number of capped amounts vectors with total at most ``budget``."""
    return sum(kernels.count_complete(caps, b) for b in range(budget + 1))


def enumerate_up_to(config: ElectionConfig, *, limit: int = DEFAULT_SUPPORT_LIMIT) -> np.ndarray:
    """All allocations with total <= budget, as an amounts matrix."""
    caps = config.expenditure_layout.caps_array()
    total = count_up_to(caps, config.budget)
    if total > limit:
        raise EnumerationLimitError(
            f"noise-model support has {total} sets, above the limit of {limit}", total
        )
    parts = [kernels.enumerate_complete(caps, b) for b in range(config.budget + 1)]
    return np.vstack(parts)


@dataclass(frozen=True)
class NoiseModel:
    """Vote distribution centered on a complete ground-truth allocation.

    The exponent coefficient is fixed at 1: a vote's log-probability is its
    dollar overlap with the ground truth, up to normalization.
    """

    config: ElectionConfig
    ground_truth: Allocation
    support_limit: int = DEFAULT_SUPPORT_LIMIT

    def __post_init__(self):
        if self.config.mode != FIXED_BUDGET:
            raise ValidationError("the noise model runs on fixed-budget elections")
        if self.ground_truth.total() != self.config.budget:
            raise ValidationError("ground truth must be a complete allocation")

    @cached_property
    def _support(self) -> tuple[np.ndarray, list[float]]:
        rows = enumerate_up_to(self.config, limit=self.support_limit)
        gt = self.config.expenditure_layout.vector(self.ground_truth)
        overlaps = kernels.overlap_many(rows, gt)
        cumulative: list[float] = []
        acc = 0.0
        for o in overlaps:
            acc += math.exp(float(o))
            cumulative.append(acc)
        return rows, cumulative

    def support_size(self) -> int:
        return len(self._support[0])

    def probability(self, vote: Allocation) -> float:
        rows, cumulative = self._support
        vec = self.config.expenditure_layout.vector(vote)
        gt = self.config.expenditure_layout.vector(self.ground_truth)
        weight = math.exp(float(np.minimum(vec, gt).sum()))
        return weight / cumulative[-1]


def sample_vote(model: NoiseModel, rng: random.Random) -> Allocation:
    """Draw one vote by exact categorical sampling over the enumerated
    support (normalization computed once and cached on the model)."""
    rows, cumulative = model._support
    u = rng.random() * cumulative[-1]
    idx = bisect.bisect_right(cumulative, u)
    if idx == len(rows):  # guard the closed upper edge
        idx -= 1
    return model.config.expenditure_layout.allocation(rows[idx])


def sample_votes(model: NoiseModel, n: int, seed: int) -> list[Allocation]:
    rng = random.Random(seed)
    return [sample_vote(model, rng) for _ in range(n)]


def mle_estimate(
    votes: list[Allocation],
    config: ElectionConfig,
    *,
    limit: int = DEFAULT_SUPPORT_LIMIT,
) -> Allocation:
    """Complete allocation maximizing total overlap with the votes, by
    exhaustive enumeration.

    Votes may be complete or underfull. Score ties are resolved toward the
    candidate whose dollar set comes first in the tie-break order, matching
    the tally's deterministic tie handling without calling the tally.
    """
    layout = config.expenditure_layout
    caps = layout.caps_array()
    n_candidates = kernels.count_complete(caps, config.budget)
    if n_candidates > limit:
        raise EnumerationLimitError(
            f"{n_candidates} complete allocations, above the limit of {limit}", n_candidates
        )
    candidates = kernels.enumerate_complete(caps, config.budget)
    vote_rows = (
        np.array([layout.vector(v) for v in votes], dtype=np.int64)
        if votes
        else np.zeros((0, len(caps)), dtype=np.int64)
    )
    scores = kernels.score_profile(vote_rows, caps)
    totals = kernels.dot_expanded(scores, candidates, caps)
    best = int(totals.max())
    rank = layout.rank_for(config.tie_break)
    best_key = None
    best_row = None
    for i in np.flatnonzero(totals == best):
        row = candidates[i]
        key = tuple(sorted(int(rank[j]) for j in np.flatnonzero(kernels.expand_amounts(row, caps))))
        if best_key is None or key < best_key:
            best_key = key
            best_row = row
    assert best_row is not None
    return layout.allocation(best_row)


def total_overlap(outcome: Allocation, votes: list[Allocation]) -> int:
    """Summed dollar overlap of an outcome with a vote profile."""
    return sum(
        sum(min(outcome.get(p), v.get(p)) for p in outcome.support() | v.support())
        for v in votes
    )
