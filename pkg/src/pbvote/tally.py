"""Aggregation rules for per-dollar budget elections.

The central rule scores every dollar subproject by how many voters funded
it and selects the ``budget`` highest-scoring dollars under a consistent
tie-break order. Variants cover approval voting with a project cap, the
integral and approximately-integral vote shapes, and joint
revenue/expenditure elections (balanced or deficit-augmented).

All rules are deterministic pure functions of (ballots, config): ballots in
any order produce identical outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import kernels
from .model import (
    BALANCED_BUDGET,
    DEFICIT_AUGMENTED,
    EMPTY_ALLOCATION,
    FIXED_BUDGET,
    Allocation,
    Ballot,
    ElectionConfig,
    KApprovalBallot,
    KnapsackBallot,
    SubprojectId,
    ValidationError,
    validate_ballot,
)

BallotLike = Union[Ballot, KnapsackBallot, KApprovalBallot]


@dataclass(frozen=True)
class ScoreTable:
    """Per-dollar scores; revenue dollars carry negative non-inclusion counts."""

    scores: Mapping[SubprojectId, int]

    def get(self, sub: SubprojectId) -> int:
        return self.scores.get(sub, 0)

    def per_project(self, config: ElectionConfig) -> dict[str, list[int]]:
        return {
            p.id: [self.scores.get(SubprojectId(p.id, t), 0) for t in range(1, p.cost + 1)]
            for p in config.projects
        }


@dataclass(frozen=True)
class Outcome:
    """The winning allocation plus rule-specific extras.

    ``funded_projects`` and ``fractional`` are set by the project-level
    rules; ``fractional`` is an exact (project, fraction-funded) pair.
    ``deficit`` is the winning deficit level of the deficit-augmented rule.
    """

    allocation: Allocation
    revenue_allocation: Allocation | None = None
    funded_projects: tuple[str, ...] | None = None
    fractional: tuple[str, Fraction] | None = None
    deficit: int | None = None

    def to_json_dict(self) -> dict:
        out: dict = {"allocation": self.allocation.as_dict()}
        if self.revenue_allocation is not None:
            out["revenue_allocation"] = self.revenue_allocation.as_dict()
        if self.funded_projects is not None:
            out["funded_projects"] = sorted(self.funded_projects)
        if self.fractional is not None:
            pid, frac = self.fractional
            out["fractional"] = {
                "project": pid,
                "fraction": f"{frac.numerator}/{frac.denominator}",
            }
        if self.deficit is not None:
            out["deficit"] = self.deficit
        return out


def _as_ballots(ballots: Iterable[BallotLike]) -> list[Ballot]:
    out = []
    for i, b in enumerate(ballots):
        out.append(b if isinstance(b, Ballot) else Ballot(voter_id=f"anonymous-{i}", payload=b))
    return out


def _knapsack_payloads(
    ballots: Sequence[BallotLike], config: ElectionConfig, *, allow_underfull: bool = False
) -> list[KnapsackBallot]:
    payloads = []
    for ballot in _as_ballots(ballots):
        if not isinstance(ballot.payload, KnapsackBallot):
            raise ValidationError(
                f"voter {ballot.voter_id!r}: expected a knapsack ballot, got {ballot.kind}"
            )
        if allow_underfull and config.mode == FIXED_BUDGET:
            # noisy-vote estimation scores sets of size up to the budget;
            # regular ballots stay strictly complete
            config.expenditure_layout.vector(ballot.payload.allocation)
            if ballot.payload.allocation.total() > config.budget:
                raise ValidationError(
                    f"voter {ballot.voter_id!r}: allocation exceeds the budget"
                )
        else:
            validate_ballot(ballot, config)
        payloads.append(ballot.payload)
    return payloads


def _approval_payloads(
    ballots: Sequence[BallotLike],
    config: ElectionConfig,
    *,
    k: int | None = None,
    integral: bool = False,
) -> list[KApprovalBallot]:
    payloads = []
    for ballot in _as_ballots(ballots):
        if not isinstance(ballot.payload, KApprovalBallot):
            raise ValidationError(
                f"voter {ballot.voter_id!r}: expected an approval ballot, got {ballot.kind}"
            )
        validate_ballot(ballot, config, k=k, integral=integral)
        payloads.append(ballot.payload)
    return payloads


def expenditure_matrix(payloads: Sequence[KnapsackBallot], config: ElectionConfig) -> np.ndarray:
    layout = config.expenditure_layout
    rows = [layout.vector(p.allocation) for p in payloads]
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(layout.caps))


def revenue_matrix(payloads: Sequence[KnapsackBallot], config: ElectionConfig) -> np.ndarray:
    layout = config.revenue_layout
    rows = [layout.vector(p.revenue_allocation or EMPTY_ALLOCATION) for p in payloads]
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(layout.caps))


def score_ballots(ballots: Sequence[BallotLike], config: ElectionConfig) -> ScoreTable:
    """Inclusion counts per expenditure dollar; revenue dollars score
    minus the number of voters that left them out."""
    payloads = _knapsack_payloads(ballots, config)
    n = len(payloads)
    table: dict[SubprojectId, int] = {}
    exp_layout = config.expenditure_layout
    exp_scores = kernels.score_profile(expenditure_matrix(payloads, config), exp_layout.caps_array())
    for sub, s in zip(exp_layout.subprojects(), exp_scores):
        table[sub] = int(s)
    rev_layout = config.revenue_layout
    if rev_layout.size:
        counts = kernels.score_profile(revenue_matrix(payloads, config), rev_layout.caps_array())
        for sub, cnt in zip(rev_layout.subprojects(), counts):
            table[sub] = int(cnt) - n
    return ScoreTable(table)


def knapsack_tally(
    ballots: Sequence[BallotLike], config: ElectionConfig, *, allow_underfull: bool = False
) -> Outcome:
    """Fund the ``budget`` highest-scoring dollars under the tie-break.

    With prefix-closed ballots and a consistent tie-break this greedy pick
    is an exact maximizer of the summed score over all prefix-closed sets
    of ``budget`` dollars. ``allow_underfull`` admits votes smaller than
    the budget (the noisy-vote support); normal ballots stay complete.
    """
    if config.mode != FIXED_BUDGET:
        raise ValidationError("knapsack tally runs on fixed-budget elections")
    payloads = _knapsack_payloads(ballots, config, allow_underfull=allow_underfull)
    layout = config.expenditure_layout
    if config.budget > layout.size:
        raise ValidationError("budget exceeds total project capacity")
    scores = kernels.score_profile(expenditure_matrix(payloads, config), layout.caps_array())
    amounts = kernels.select_top(
        scores, layout.rank_for(config.tie_break), layout.caps_array(), config.budget
    )
    return Outcome(allocation=layout.allocation(amounts))


def _project_tie_positions(config: ElectionConfig) -> dict[str, int]:
    return {pid: i for i, pid in enumerate(config.tie_break_projects())}


def approval_counts(payloads: Sequence[KApprovalBallot], config: ElectionConfig) -> dict[str, int]:
    counts = {pid: 0 for pid in config.project_ids()}
    for p in payloads:
        for pid in p.approved:
            counts[pid] += 1
    return counts


def _ranked_projects(counts: Mapping[str, int], config: ElectionConfig) -> list[str]:
    pos = _project_tie_positions(config)
    return sorted(counts, key=lambda pid: (-counts[pid], pos[pid]))


def kapproval_tally(
    ballots: Sequence[BallotLike], k: int | None, config: ElectionConfig
) -> Outcome:
    """Approval voting: fund projects in descending approval order.

    A project that does not fit the remaining budget is skipped permanently
    and scanning continues down the list.
    """
    payloads = _approval_payloads(ballots, config, k=k)
    counts = approval_counts(payloads, config)
    funded: list[str] = []
    remaining = config.budget
    for pid in _ranked_projects(counts, config):
        cost = config.project(pid).cost
        if cost <= remaining:
            funded.append(pid)
            remaining -= cost
    return Outcome(
        allocation=Allocation.of({pid: config.project(pid).cost for pid in funded}),
        funded_projects=tuple(funded),
    )


def integral_knapsack_tally(
    ballots: Sequence[BallotLike], config: ElectionConfig, fractional_last: bool = False
) -> Outcome:
    """Integral votes (approved sets within the budget), funded in approval
    order until the next project in line does not fit.

    With ``fractional_last`` the first non-fitting project receives the
    whole remaining budget, recorded as an exact fraction of its cost.
    """
    payloads = _approval_payloads(ballots, config, integral=True)
    counts = approval_counts(payloads, config)
    funded: list[str] = []
    remaining = config.budget
    fractional = None
    amounts: dict[str, int] = {}
    for pid in _ranked_projects(counts, config):
        cost = config.project(pid).cost
        if cost <= remaining:
            funded.append(pid)
            amounts[pid] = cost
            remaining -= cost
        else:
            if fractional_last and remaining > 0:
                fractional = (pid, Fraction(remaining, cost))
                amounts[pid] = remaining
            break
    return Outcome(
        allocation=Allocation.of(amounts),
        funded_projects=tuple(funded),
        fractional=fractional,
    )


def _side_order(scores: np.ndarray, rank: np.ndarray) -> np.ndarray:
    return np.lexsort((rank, -scores))


def _balanced_select(
    exp_scores: np.ndarray,
    rev_scores: np.ndarray,
    exp_rank: np.ndarray,
    rev_rank: np.ndarray,
) -> tuple[int, np.ndarray, np.ndarray]:
    """Best paired size k, maximizing summed scores, ties toward larger k.

    For a fixed k the optimum takes each side's k best dollars, so the
    search reduces to prefix sums along each side's selection order.
    """
    exp_order = _side_order(exp_scores, exp_rank)
    rev_order = _side_order(rev_scores, rev_rank)
    k_max = min(len(exp_order), len(rev_order))
    exp_prefix = np.concatenate(([0], np.cumsum(exp_scores[exp_order])))
    rev_prefix = np.concatenate(([0], np.cumsum(rev_scores[rev_order])))
    totals = exp_prefix[: k_max + 1] + rev_prefix[: k_max + 1]
    best_k = 0
    for k in range(k_max + 1):
        if totals[k] >= totals[best_k]:
            best_k = k
    return best_k, exp_order[:best_k], rev_order[:best_k]


def _amounts_from_flat(picked: np.ndarray, caps: np.ndarray) -> np.ndarray:
    offsets = np.zeros(len(caps), dtype=np.int64)
    np.cumsum(caps[:-1], out=offsets[1:])
    projects = np.searchsorted(offsets, picked, side="right") - 1
    return np.bincount(projects, minlength=len(caps)).astype(np.int64)


def balanced_budget_tally(ballots: Sequence[BallotLike], config: ElectionConfig) -> Outcome:
    """Joint expenditure/revenue rule: pick equal-size dollar sets
    maximizing expenditure scores plus (negative) revenue scores."""
    if config.mode != BALANCED_BUDGET:
        raise ValidationError("balanced tally runs on balanced-budget elections")
    payloads = _knapsack_payloads(ballots, config)
    n = len(payloads)
    exp_layout, rev_layout = config.expenditure_layout, config.revenue_layout
    exp_scores = kernels.score_profile(expenditure_matrix(payloads, config), exp_layout.caps_array())
    rev_scores = (
        kernels.score_profile(revenue_matrix(payloads, config), rev_layout.caps_array()) - n
    )
    _, exp_picked, rev_picked = _balanced_select(
        exp_scores,
        rev_scores,
        exp_layout.rank_for(config.tie_break),
        rev_layout.rank_for(config.tie_break),
    )
    return Outcome(
        allocation=exp_layout.allocation(_amounts_from_flat(exp_picked, exp_layout.caps_array())),
        revenue_allocation=rev_layout.allocation(
            _amounts_from_flat(rev_picked, rev_layout.caps_array())
        ),
    )


def deficit_augmented_tally(ballots: Sequence[BallotLike], config: ElectionConfig) -> Outcome:
    """Balanced rule over revenue items plus a synthetic deficit item whose
    cap is the total expenditure capacity; each ballot implicitly funds the
    deficit at its own expenditure-minus-revenue level."""
    if config.mode != DEFICIT_AUGMENTED:
        raise ValidationError("deficit tally runs on deficit-augmented elections")
    payloads = _knapsack_payloads(ballots, config)
    n = len(payloads)
    exp_layout, rev_layout = config.expenditure_layout, config.revenue_layout
    exp_scores = kernels.score_profile(expenditure_matrix(payloads, config), exp_layout.caps_array())

    deficit_cap = exp_layout.size
    aug_caps = np.concatenate((rev_layout.caps_array(), [deficit_cap])).astype(np.int64)
    rev_rows = revenue_matrix(payloads, config)
    deltas = np.array(
        [
            [p.allocation.total() - (p.revenue_allocation or EMPTY_ALLOCATION).total()]
            for p in payloads
        ],
        dtype=np.int64,
    ).reshape(n, 1)
    aug_rows = np.hstack((rev_rows, deltas)) if n else np.zeros((0, len(aug_caps)), dtype=np.int64)
    aug_scores = kernels.score_profile(aug_rows, aug_caps) - n
    # synthetic dollars rank after every real subproject, in dollar order
    base = len(config.tie_break.order)
    aug_rank = np.concatenate(
        (rev_layout.rank_for(config.tie_break), base + np.arange(deficit_cap, dtype=np.int64))
    )
    _, exp_picked, rev_picked = _balanced_select(
        exp_scores, aug_scores, exp_layout.rank_for(config.tie_break), aug_rank
    )
    aug_amounts = _amounts_from_flat(rev_picked, aug_caps)
    return Outcome(
        allocation=exp_layout.allocation(
            _amounts_from_flat(exp_picked, exp_layout.caps_array())
        ),
        revenue_allocation=rev_layout.allocation(aug_amounts[:-1]),
        deficit=int(aug_amounts[-1]),
    )


TALLY_METHODS = ("knapsack", "kapproval", "integral", "approx-integral", "balanced", "deficit")


def run_method(
    method: str,
    ballots: Sequence[BallotLike],
    config: ElectionConfig,
    *,
    k: int | None = None,
) -> Outcome:
    """Dispatch by method name; ballots must already match the method's shape."""
    if method == "knapsack":
        return knapsack_tally(ballots, config)
    if method == "kapproval":
        return kapproval_tally(ballots, k, config)
    if method == "integral":
        return integral_knapsack_tally(ballots, config, fractional_last=False)
    if method == "approx-integral":
        return integral_knapsack_tally(ballots, config, fractional_last=True)
    if method == "balanced":
        return balanced_budget_tally(ballots, config)
    if method == "deficit":
        return deficit_augmented_tally(ballots, config)
    raise ValidationError(f"unknown tally method {method!r}")


def ballots_for_method(ballots: Sequence[Ballot], method: str) -> list[Ballot]:
    """Filter a mixed log down to the ballots the method consumes."""
    kind = "knapsack" if method in ("knapsack", "balanced", "deficit") else "kapproval"
    return [b for b in ballots if b.kind == kind]
