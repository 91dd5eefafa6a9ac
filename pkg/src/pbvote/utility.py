"""Voter utility and cost models over allocations.

Three models: l1 cost (total dollar disagreement with the voter's ideal),
overlap utility (dollars of agreement), and additive concave utility
(per-project non-increasing dollar marginals, of which overlap is the 0/1
special case). All arithmetic is exact integers/rationals; no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Union

from .model import Allocation, ElectionConfig, ValidationError

L1_COST = "l1"
OVERLAP = "overlap"
ADDITIVE_CONCAVE = "additive-concave"

Marginal = Union[int, Fraction]


@dataclass(frozen=True)
class UtilityModel:
    """A voter's utility model.

    For the additive-concave kind, ``marginals[p][t-1]`` is the value of
    project p's dollar t; sequences must be non-negative and non-increasing
    (a non-decreasing concave per-project value function).
    """

    kind: str
    marginals: Mapping[str, tuple[Marginal, ...]] | None = None

    def __post_init__(self):
        if self.kind not in (L1_COST, OVERLAP, ADDITIVE_CONCAVE):
            raise ValidationError(f"unknown utility model {self.kind!r}")
        if self.kind == ADDITIVE_CONCAVE:
            if self.marginals is None:
                raise ValidationError("additive-concave model needs marginal values")
            for pid, seq in self.marginals.items():
                for a, b in zip(seq, seq[1:]):
                    if b > a:
                        raise ValidationError(
                            f"marginals for {pid!r} must be non-increasing"
                        )
                if any(v < 0 for v in seq):
                    raise ValidationError(f"marginals for {pid!r} must be non-negative")

    @staticmethod
    def l1() -> "UtilityModel":
        return UtilityModel(L1_COST)

    @staticmethod
    def overlap() -> "UtilityModel":
        return UtilityModel(OVERLAP)

    @staticmethod
    def additive(marginals: Mapping[str, tuple[Marginal, ...]]) -> "UtilityModel":
        return UtilityModel(ADDITIVE_CONCAVE, {p: tuple(seq) for p, seq in marginals.items()})

    @staticmethod
    def overlap_shaped(ideal: Allocation, config: ElectionConfig) -> "UtilityModel":
        """Additive model worth 1 per dollar up to the ideal amount, 0 after."""
        marginals = {
            p.id: tuple(1 if t <= ideal.get(p.id) else 0 for t in range(1, p.cost + 1))
            for p in config.projects
        }
        return UtilityModel.additive(marginals)


def _require_same_total(outcome: Allocation, ideal: Allocation) -> int:
    a, b = outcome.total(), ideal.total()
    if a != b:
        raise ValidationError(
            f"l1 cost needs complete allocations with equal totals (got {a} and {b}); "
            "underfull outcomes violate free disposal"
        )
    return a


def l1_cost(outcome: Allocation, ideal: Allocation) -> int:
    """Total dollar disagreement: sum over projects of |w_p - w^v_p|.

    Defined only for allocations with equal totals; an underfull outcome is
    rejected because dollar-distance loses free disposal there.
    """
    _require_same_total(outcome, ideal)
    projects = outcome.support() | ideal.support()
    return sum(abs(outcome.get(p) - ideal.get(p)) for p in projects)


def overlap_utility(outcome: Allocation, ideal: Allocation) -> int:
    """Dollars of agreement: sum over projects of min(w_p, w^v_p)."""
    projects = outcome.support() | ideal.support()
    return sum(min(outcome.get(p), ideal.get(p)) for p in projects)


def additive_concave_utility(outcome: Allocation, model: UtilityModel):
    """Sum of the outcome's funded dollars' marginal values.

    Reduces to overlap utility when the marginals are 1 up to the voter's
    ideal amount and 0 after.
    """
    if model.kind != ADDITIVE_CONCAVE or model.marginals is None:
        raise ValidationError("additive_concave_utility needs an additive-concave model")
    total: Marginal = 0
    for pid, w in outcome.amounts:
        seq = model.marginals.get(pid, ())
        if w > len(seq):
            raise ValidationError(f"model gives no marginals for dollar {w} of {pid!r}")
        total += sum(seq[:w])
    if isinstance(total, Rational) and not isinstance(total, int):
        total = Fraction(total)
        return int(total) if total.denominator == 1 else total
    return total


def check_equivalence(outcome: Allocation, ideal: Allocation, budget: int) -> bool:
    """Overlap/l1 identity.

    With both allocations complete (totals equal ``budget``) the overlap
    equals budget - l1/2. With an underfull ideal against a complete
    outcome (the approximately-integral regime) it equals
    (budget + ideal_total)/2 - l1/2. Exact integer arithmetic throughout.
    """
    ideal_total = ideal.total()
    if outcome.total() != budget or ideal_total > budget:
        raise ValidationError("outcome must total the budget, ideal at most the budget")
    projects = outcome.support() | ideal.support()
    l1 = sum(abs(outcome.get(p) - ideal.get(p)) for p in projects)
    twice_expected = budget + ideal_total - l1
    if twice_expected % 2 != 0:
        return False
    return overlap_utility(outcome, ideal) == twice_expected // 2


def balanced_disutility(
    outcome_expenditure: Allocation,
    outcome_revenue: Allocation,
    ideal_expenditure: Allocation,
    ideal_revenue: Allocation,
    *,
    outcome_deficit: int | None = None,
    ideal_deficit: int | None = None,
) -> int:
    """Dollar disagreement summed over both sides; deficit-augmented
    elections add the disagreement in deficit levels."""

    def side(outcome: Allocation, ideal: Allocation) -> int:
        projects = outcome.support() | ideal.support()
        return sum(abs(outcome.get(p) - ideal.get(p)) for p in projects)

    total = side(outcome_expenditure, ideal_expenditure) + side(outcome_revenue, ideal_revenue)
    if (outcome_deficit is None) != (ideal_deficit is None):
        raise ValidationError("deficit terms must be given for both outcome and ideal")
    if outcome_deficit is not None and ideal_deficit is not None:
        total += abs(outcome_deficit - ideal_deficit)
    return total
