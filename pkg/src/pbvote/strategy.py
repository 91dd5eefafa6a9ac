"""Brute-force best-response analysis of the voting rules.

Everything here works by exhaustive enumeration at desk scale: list every
vote a focal voter could cast, run the real tally for each, and compare
utilities. On top of that sit the verification suites: truthful dominance
(fixed-budget and balanced rules), welfare optimality, best-response
domination closure under additive concave utilities, the integral
approximation bound, and the fixed coalition-manipulation demonstration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Sequence

import numpy as np

from . import kernels
from .model import (
    Allocation,
    Ballot,
    ElectionConfig,
    EnumerationLimitError,
    KApprovalBallot,
    KnapsackBallot,
    ProjectSpec,
    TieBreakOrder,
    ValidationError,
)
from .synth import (
    derive_rng,
    random_balanced_config,
    random_balanced_vote,
    random_complete_allocation,
    random_fixed_config,
    random_knapsack_profile,
    random_marginals,
)
from .tally import (
    Outcome,
    balanced_budget_tally,
    expenditure_matrix,
    integral_knapsack_tally,
    kapproval_tally,
    knapsack_tally,
)
from .utility import (
    ADDITIVE_CONCAVE,
    L1_COST,
    OVERLAP,
    UtilityModel,
    additive_concave_utility,
    balanced_disutility,
    l1_cost,
    overlap_utility,
)

DEFAULT_VOTE_LIMIT = 250_000


@dataclass(frozen=True)
class StrategyInstance:
    """A focal voter's decision problem against fixed opposing ballots."""

    config: ElectionConfig
    other_ballots: tuple[Ballot, ...]
    focal_model: UtilityModel
    focal_ideal: Allocation | None = None
    focal_ideal_revenue: Allocation | None = None

    def __post_init__(self):
        if self.focal_model.kind in (L1_COST, OVERLAP):
            if self.focal_ideal is None:
                raise ValidationError(f"{self.focal_model.kind} model needs a focal ideal")


def enumerate_valid_votes(
    config: ElectionConfig,
    *,
    max_subprojects: int | None = None,
    max_votes: int = DEFAULT_VOTE_LIMIT,
) -> list[Allocation]:
    """Every complete allocation, in ascending lexicographic order of the
    per-project amount vector (deterministic and duplicate-free).

    The refusal is keyed to the exact number of candidate votes (reported
    in the error); an explicit subproject cap can be layered on top.
    """
    layout = config.expenditure_layout
    if max_subprojects is not None and layout.size > max_subprojects:
        raise EnumerationLimitError(
            f"{layout.size} subprojects exceed the enumeration limit of {max_subprojects}",
            layout.size,
        )
    count = kernels.count_complete(layout.caps_array(), config.budget)
    if count > max_votes:
        raise EnumerationLimitError(
            f"{count} candidate votes exceed the limit of {max_votes}", count
        )
    rows = kernels.enumerate_complete(layout.caps_array(), config.budget)
    return [layout.allocation(row) for row in rows]


def _flat_marginals(model: UtilityModel, config: ElectionConfig) -> tuple[np.ndarray, int]:
    """Marginal value per expenditure dollar, scaled to integers.

    Returns (values, denominator): true marginals are values/denominator.
    """
    layout = config.expenditure_layout
    if model.kind == ADDITIVE_CONCAVE:
        assert model.marginals is not None
        fractions = [
            Fraction(model.marginals[pid][t - 1])
            for pid in layout.project_ids
            for t in range(1, config.project(pid).cost + 1)
        ]
        denominator = reduce(lambda a, f: a * f.denominator // gcd(a, f.denominator), fractions, 1)
        values = np.array([int(f * denominator) for f in fractions], dtype=np.int64)
        return values, denominator
    raise ValidationError(f"no per-dollar marginals for model {model.kind!r}")


def _overlap_marginals(ideal: Allocation, config: ElectionConfig) -> np.ndarray:
    layout = config.expenditure_layout
    return kernels.expand_amounts(layout.vector(ideal), layout.caps_array())


def _base_scores(instance: StrategyInstance) -> np.ndarray:
    config = instance.config
    payloads = [b.payload for b in instance.other_ballots]
    if not all(isinstance(p, KnapsackBallot) for p in payloads):
        raise ValidationError("per-dollar sweeps need knapsack ballots")
    layout = config.expenditure_layout
    return kernels.score_profile(expenditure_matrix(payloads, config), layout.caps_array())


def knapsack_vote_sweep(
    instance: StrategyInstance,
    *,
    max_subprojects: int | None = None,
    max_votes: int = DEFAULT_VOTE_LIMIT,
) -> tuple[list[Allocation], np.ndarray, int]:
    """Utilities of every candidate vote under the per-dollar tally.

    Returns (candidates, integer utilities, denominator); real utilities
    are utilities/denominator. For overlap and l1 models the integers are
    outcome overlaps with the focal ideal.
    """
    config = instance.config
    layout = config.expenditure_layout
    candidates = enumerate_valid_votes(
        config, max_subprojects=max_subprojects, max_votes=max_votes
    )
    rows = np.array([layout.vector(c) for c in candidates], dtype=np.int64)
    if instance.focal_model.kind == ADDITIVE_CONCAVE:
        marginals, denominator = _flat_marginals(instance.focal_model, config)
    else:
        assert instance.focal_ideal is not None
        marginals, denominator = _overlap_marginals(instance.focal_ideal, config), 1
    utilities = kernels.sweep_utilities(
        _base_scores(instance),
        rows,
        layout.caps_array(),
        layout.rank_for(config.tie_break),
        config.budget,
        marginals,
    )
    return candidates, utilities, denominator


# --- voting rules as pluggable vote spaces ----------------------------------


class KnapsackRule:
    """Per-dollar rule over complete allocations."""

    name = "knapsack"

    def enumerate_votes(self, config: ElectionConfig) -> list[Allocation]:
        return enumerate_valid_votes(config)

    def wrap(self, vote: Allocation) -> KnapsackBallot:
        return KnapsackBallot(vote)

    def run(self, ballots: Sequence, config: ElectionConfig) -> Outcome:
        return knapsack_tally(ballots, config)


class KApprovalRule:
    """Approval rule; votes are project sets of size at most k."""

    name = "kapproval"

    def __init__(self, k: int):
        self.k = k

    def enumerate_votes(self, config: ElectionConfig) -> list[frozenset[str]]:
        ids = config.project_ids()
        out: list[frozenset[str]] = []
        for size in range(0, self.k + 1):
            out.extend(frozenset(c) for c in combinations(ids, size))
        return out

    def wrap(self, vote: frozenset[str]) -> KApprovalBallot:
        return KApprovalBallot(vote)

    def run(self, ballots: Sequence, config: ElectionConfig) -> Outcome:
        return kapproval_tally(ballots, self.k, config)


class IntegralKnapsackRule:
    """Integral rule; votes are project sets within the budget."""

    name = "integral"

    def __init__(self, fractional_last: bool = False):
        self.fractional_last = fractional_last

    def enumerate_votes(self, config: ElectionConfig) -> list[frozenset[str]]:
        ids = config.project_ids()
        costs = config.costs()
        out: list[frozenset[str]] = []
        for size in range(0, len(ids) + 1):
            for combo in combinations(ids, size):
                if sum(costs[p] for p in combo) <= config.budget:
                    out.append(frozenset(combo))
        return out

    def wrap(self, vote: frozenset[str]) -> KApprovalBallot:
        return KApprovalBallot(vote)

    def run(self, ballots: Sequence, config: ElectionConfig) -> Outcome:
        return integral_knapsack_tally(ballots, config, fractional_last=self.fractional_last)


class BalancedRule:
    """Joint expenditure/revenue rule; votes are equal-total pairs."""

    name = "balanced"

    def enumerate_votes(self, config: ElectionConfig) -> list[KnapsackBallot]:
        exp_layout, rev_layout = config.expenditure_layout, config.revenue_layout
        out: list[KnapsackBallot] = []
        for size in range(0, min(exp_layout.size, rev_layout.size) + 1):
            exp_rows = kernels.enumerate_complete(exp_layout.caps_array(), size)
            rev_rows = kernels.enumerate_complete(rev_layout.caps_array(), size)
            for e in exp_rows:
                for r in rev_rows:
                    out.append(
                        KnapsackBallot(
                            allocation=exp_layout.allocation(e),
                            revenue_allocation=rev_layout.allocation(r),
                        )
                    )
        return out

    def wrap(self, vote: KnapsackBallot) -> KnapsackBallot:
        return vote

    def run(self, ballots: Sequence, config: ElectionConfig) -> Outcome:
        return balanced_budget_tally(ballots, config)


def _utility_of_outcome(outcome: Outcome, instance: StrategyInstance):
    """Focal utility of an outcome, exact; higher is better for all kinds."""
    model = instance.focal_model
    alloc = outcome.allocation
    if model.kind == OVERLAP:
        assert instance.focal_ideal is not None
        return overlap_utility(alloc, instance.focal_ideal)
    if model.kind == L1_COST:
        assert instance.focal_ideal is not None
        if instance.focal_ideal_revenue is not None or outcome.revenue_allocation is not None:
            return -balanced_disutility(
                alloc,
                outcome.revenue_allocation or Allocation(),
                instance.focal_ideal,
                instance.focal_ideal_revenue or Allocation(),
            )
        return -l1_cost(alloc, instance.focal_ideal)
    if model.kind == ADDITIVE_CONCAVE:
        return additive_concave_utility(alloc, model)
    raise ValidationError(f"unknown model {model.kind!r}")


def best_response(instance: StrategyInstance, rule) -> tuple[object, object]:
    """Exhaustive best response: evaluate every vote in the rule's space
    and return the first maximizer under the deterministic vote order,
    together with its utility."""
    config = instance.config
    votes = rule.enumerate_votes(config)
    best_vote, best_utility = None, None
    for vote in votes:
        outcome = rule.run(list(instance.other_ballots) + [rule.wrap(vote)], config)
        utility = _utility_of_outcome(outcome, instance)
        if best_utility is None or utility > best_utility:
            best_vote, best_utility = vote, utility
    if best_vote is None:
        raise ValidationError("the rule admits no votes")
    return best_vote, best_utility


def response_utilities(instance: StrategyInstance, rule) -> list[tuple[object, object]]:
    """(vote, utility) for every vote in the rule's space, in vote order."""
    config = instance.config
    out = []
    for vote in rule.enumerate_votes(config):
        outcome = rule.run(list(instance.other_ballots) + [rule.wrap(vote)], config)
        out.append((vote, _utility_of_outcome(outcome, instance)))
    return out


# --- truthful dominance ------------------------------------------------------


def _instance_dict(config: ElectionConfig, others: Sequence[Ballot], extra: dict) -> dict:
    record = {
        "config": config.to_json_dict(),
        "other_ballots": [
            {
                "allocation": b.payload.allocation.as_dict(),
                **(
                    {"revenue_allocation": b.payload.revenue_allocation.as_dict()}
                    if getattr(b.payload, "revenue_allocation", None) is not None
                    else {}
                ),
            }
            for b in others
        ],
    }
    record.update(extra)
    return record


def verify_strategyproofness(
    trials: int,
    seed: int,
    *,
    mode: str = "fixed",
    max_subprojects: int = 12,
    max_other_voters: int = 4,
    trial_offset: int = 0,
) -> dict:
    """Truthful dominance of the per-dollar rule, checked exhaustively.

    Per trial: a random instance and focal ideal; every alternative vote is
    evaluated under both the overlap and l1 models ("fixed" mode) or the
    two-sided dollar-distance ("balanced" mode). Any alternative strictly
    beating the truthful vote is reported verbatim. The report must come
    back with zero violations.
    """
    if mode not in ("fixed", "balanced"):
        raise ValidationError(f"unknown dominance mode {mode!r}")
    violations: list[dict] = []
    votes_checked = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = derive_rng(seed, "dominance", mode, t)
        if mode == "fixed":
            config = random_fixed_config(rng, max_subprojects=max_subprojects)
            others = random_knapsack_profile(config, rng, rng.randint(0, max_other_voters))
            ideal = random_complete_allocation(config, rng)
            instance = StrategyInstance(
                config=config,
                other_ballots=tuple(others),
                focal_model=UtilityModel.overlap(),
                focal_ideal=ideal,
            )
            candidates, utilities, _ = knapsack_vote_sweep(instance)
            truthful_utility = int(utilities[candidates.index(ideal)])
            votes_checked += len(candidates)
            best = int(utilities.max())
            if best > truthful_utility:
                alt = candidates[int(np.argmax(utilities))]
                violations.append(
                    _instance_dict(
                        config,
                        others,
                        {
                            "trial": t,
                            "focal_ideal": ideal.as_dict(),
                            "alternative": alt.as_dict(),
                            "truthful_overlap": truthful_utility,
                            "alternative_overlap": best,
                            "truthful_l1": 2 * config.budget - 2 * truthful_utility,
                            "alternative_l1": 2 * config.budget - 2 * best,
                        },
                    )
                )
        else:
            config = random_balanced_config(rng, max_subprojects=max_subprojects)
            others = [
                Ballot(f"v{i + 1}", random_balanced_vote(config, rng))
                for i in range(rng.randint(0, max_other_voters))
            ]
            ideal = random_balanced_vote(config, rng)
            rule = BalancedRule()

            def disutility(vote: KnapsackBallot) -> int:
                outcome = rule.run(list(others) + [vote], config)
                return balanced_disutility(
                    outcome.allocation,
                    outcome.revenue_allocation or Allocation(),
                    ideal.allocation,
                    ideal.revenue_allocation or Allocation(),
                )

            truthful_cost = disutility(ideal)
            for vote in rule.enumerate_votes(config):
                votes_checked += 1
                cost = disutility(vote)
                if cost < truthful_cost:
                    violations.append(
                        _instance_dict(
                            config,
                            others,
                            {
                                "trial": t,
                                "focal_ideal": {
                                    "allocation": ideal.allocation.as_dict(),
                                    "revenue_allocation": (
                                        ideal.revenue_allocation or Allocation()
                                    ).as_dict(),
                                },
                                "alternative": {
                                    "allocation": vote.allocation.as_dict(),
                                    "revenue_allocation": (
                                        vote.revenue_allocation or Allocation()
                                    ).as_dict(),
                                },
                                "truthful_disutility": truthful_cost,
                                "alternative_disutility": cost,
                            },
                        )
                    )
    return {
        "check": "truthful-dominance",
        "rule": "knapsack" if mode == "fixed" else "balanced",
        "models": ["overlap", "l1"] if mode == "fixed" else ["l1-two-sided"],
        "trials": trials,
        "seed": seed,
        "votes_checked": votes_checked,
        "violations": violations,
    }


# --- welfare maximization ----------------------------------------------------


def verify_welfare_maximization(config: ElectionConfig, ballots: Sequence[Ballot]) -> dict:
    """Check the tally outcome attains the enumerated welfare maximum.

    Social welfare of a complete allocation is its summed overlap with the
    ballots, which equals the summed per-dollar score of its expansion.
    """
    layout = config.expenditure_layout
    payloads = [b.payload for b in ballots]
    scores = kernels.score_profile(expenditure_matrix(payloads, config), layout.caps_array())
    candidates = kernels.enumerate_complete(layout.caps_array(), config.budget)
    welfare = kernels.dot_expanded(scores, candidates, layout.caps_array())
    outcome = knapsack_tally(ballots, config)
    outcome_welfare = int(
        kernels.dot_expanded(
            scores, layout.vector(outcome.allocation).reshape(1, -1), layout.caps_array()
        )[0]
    )
    maximum = int(welfare.max()) if len(welfare) else 0
    return {
        "check": "welfare-maximization",
        "outcome": outcome.allocation.as_dict(),
        "outcome_welfare": outcome_welfare,
        "maximum_welfare": maximum,
        "optimal": outcome_welfare == maximum,
        "argmax_count": int((welfare == maximum).sum()) if len(welfare) else 0,
    }


def welfare_suite(trials: int, seed: int, *, max_subprojects: int = 12, trial_offset: int = 0) -> dict:
    violations = []
    for t in range(trial_offset, trial_offset + trials):
        rng = derive_rng(seed, "welfare", t)
        config = random_fixed_config(rng, max_subprojects=max_subprojects)
        ballots = random_knapsack_profile(config, rng, rng.randint(1, 6))
        result = verify_welfare_maximization(config, ballots)
        if not result["optimal"]:
            violations.append(
                _instance_dict(config, ballots, {"trial": t, "result": result})
            )
    return {
        "check": "welfare-maximization",
        "trials": trials,
        "seed": seed,
        "violations": violations,
    }


# --- partial strategy-proofness (domination closure) --------------------------


def _winners_without_focal(instance: StrategyInstance, rule) -> np.ndarray:
    """Expansion (0/1 per dollar) of the outcome over the other ballots."""
    config = instance.config
    layout = config.expenditure_layout
    outcome = rule.run(list(instance.other_ballots), config)
    return kernels.expand_amounts(layout.vector(outcome.allocation), layout.caps_array())


def _expand_vote(vote, rule, config: ElectionConfig) -> np.ndarray:
    layout = config.expenditure_layout
    if isinstance(vote, Allocation):
        vec = layout.vector(vote)
    else:  # project set: approval-shaped vote funds whole projects
        vec = layout.vector(
            Allocation.of({pid: config.project(pid).cost for pid in vote})
        )
    return kernels.expand_amounts(vec, layout.caps_array())


def is_domination_closed(
    vote_mask: np.ndarray, winners_mask: np.ndarray, marginals: np.ndarray
) -> bool:
    """Closure under domination: a dollar k dominates j when k wins without
    the focal vote and has strictly higher marginal value; a closed vote
    containing j must contain every such k. Equivalently, no winning dollar
    left out of the vote may be worth strictly more than the vote's
    cheapest member."""
    in_vote = vote_mask.astype(bool)
    if not in_vote.any():
        return True
    left_out_winners = winners_mask.astype(bool) & ~in_vote
    if not left_out_winners.any():
        return True
    return marginals[left_out_winners].max() <= marginals[in_vote].min()


def verify_partial_strategyproofness(
    instance: StrategyInstance, rule=None
) -> dict:
    """Inspect the whole best-response set of an additive-concave voter and
    report whether some member is closed under domination (the existence
    claim), with the winners-without-focal set at dollar granularity.

    The report also carries the best utility achievable by any closed vote,
    so a failed existence claim is quantified: ``best_closed_utility`` then
    sits strictly below ``best_utility``.
    """
    if instance.focal_model.kind != ADDITIVE_CONCAVE:
        raise ValidationError("partial strategy-proofness runs on additive-concave models")
    rule = rule or KnapsackRule()
    config = instance.config
    marginal_values, denominator = _flat_marginals(instance.focal_model, config)
    winners_mask = _winners_without_focal(instance, rule)
    if isinstance(rule, KnapsackRule):
        candidates, utilities, _ = knapsack_vote_sweep(instance)
        best = int(utilities.max())
        argmax = [candidates[i] for i in np.flatnonzero(utilities == best)]
        best_utility = Fraction(best, denominator)
        all_pairs = [
            (vote, Fraction(int(u), denominator)) for vote, u in zip(candidates, utilities)
        ]
    else:
        all_pairs = response_utilities(instance, rule)
        best_utility = max(u for _, u in all_pairs)
        argmax = [v for v, u in all_pairs if u == best_utility]
    closed_votes = []
    for vote in argmax:
        mask = _expand_vote(vote, rule, config)
        if is_domination_closed(mask, winners_mask, marginal_values):
            closed_votes.append(vote)
    best_closed = None
    for vote, utility in all_pairs:
        mask = _expand_vote(vote, rule, config)
        if is_domination_closed(mask, winners_mask, marginal_values):
            if best_closed is None or utility > best_closed:
                best_closed = utility
    layout = config.expenditure_layout
    return {
        "check": "domination-closure",
        "rule": rule.name,
        "best_utility": str(best_utility),
        "best_closed_utility": None if best_closed is None else str(best_closed),
        "argmax_size": len(argmax),
        "closed_count": len(closed_votes),
        "exists_closed": bool(closed_votes),
        "closed_witness": _vote_dict(closed_votes[0]) if closed_votes else None,
        "argmax": [_vote_dict(v) for v in argmax[:50]],
        "winners_without_focal": layout.allocation(
            np.array(
                [
                    winners_mask[layout.offsets[p] : layout.offsets[p] + layout.caps[p]].sum()
                    for p in range(len(layout.caps))
                ],
                dtype=np.int64,
            )
        ).as_dict(),
    }


def _vote_dict(vote) -> dict | list:
    if isinstance(vote, Allocation):
        return vote.as_dict()
    return sorted(vote)


def partial_strategyproofness_suite(
    trials: int, seed: int, *, max_subprojects: int = 12, trial_offset: int = 0
) -> dict:
    """Existence of a domination-closed best response on random instances.

    Violations are reported verbatim with the full closure report. They do
    occur at a low rate (a few percent): with a deterministic consistent
    tie-break, score ties can force every optimal vote to spend filler
    dollars on low-value projects to win quota races, while a displaced
    winner dominates those fillers; no optimal vote is then closed.
    ``best_closed_utility`` quantifies each gap.
    """
    violations = []
    for t in range(trial_offset, trial_offset + trials):
        rng = derive_rng(seed, "closure", t)
        config = random_fixed_config(rng, max_subprojects=max_subprojects)
        others = random_knapsack_profile(config, rng, rng.randint(1, 6))
        model = random_marginals(config, rng)
        instance = StrategyInstance(
            config=config, other_ballots=tuple(others), focal_model=model
        )
        result = verify_partial_strategyproofness(instance)
        if not result["exists_closed"]:
            violations.append(
                _instance_dict(
                    config,
                    others,
                    {
                        "trial": t,
                        "marginals": {p: list(m) for p, m in model.marginals.items()},
                        "report": result,
                    },
                )
            )
    return {
        "check": "domination-closure",
        "trials": trials,
        "seed": seed,
        "violations": violations,
    }


# --- integral approximation ----------------------------------------------------


def integral_approximation_suite(
    trials: int, seed: int, *, trial_offset: int = 0
) -> dict:
    """Strictly integral outcomes against every alternative vote: the
    truthful vote's utility must come within one project's value of the
    best alternative's utility (overlap-style, full project costs)."""
    violations = []
    for t in range(trial_offset, trial_offset + trials):
        rng = derive_rng(seed, "integral", t)
        projects = tuple(
            ProjectSpec(id=f"p{i + 1}", name=f"Project {i + 1}", cost=rng.randint(1, 5))
            for i in range(rng.randint(2, 4))
        )
        total = sum(p.cost for p in projects)
        config = ElectionConfig(projects=projects, budget=rng.randint(1, total))
        rule = IntegralKnapsackRule(fractional_last=False)
        feasible = rule.enumerate_votes(config)
        others = [
            Ballot(f"v{i + 1}", KApprovalBallot(rng.choice(feasible)))
            for i in range(rng.randint(0, 4))
        ]
        ideal = rng.choice(feasible)
        costs = config.costs()

        def utility(vote: frozenset[str]) -> int:
            outcome = rule.run(list(others) + [KApprovalBallot(vote)], config)
            funded = set(outcome.funded_projects or ())
            return sum(costs[p] for p in funded & ideal)

        truthful = utility(ideal)
        best = max(utility(v) for v in feasible)
        slack = max(costs.values())
        if truthful < best - slack:
            violations.append(
                {
                    "trial": t,
                    "config": config.to_json_dict(),
                    "others": [sorted(b.payload.approved) for b in others],
                    "ideal": sorted(ideal),
                    "truthful_utility": truthful,
                    "best_utility": best,
                    "slack": slack,
                }
            )
    return {
        "check": "integral-approximation",
        "trials": trials,
        "seed": seed,
        "violations": violations,
    }


# --- coalition manipulation demo ----------------------------------------------


def group_manipulation_instance() -> tuple[ElectionConfig, list[Ballot]]:
    """Five projects, four voters, budget 2, ties in the order b,d,c,e,a.

    Voters 1 and 2 put everything on project a; voters 3 and 4 split across
    (b, c) and (d, e). Truthfully a wins outright, leaving voters 3 and 4
    with nothing; if they jointly switch to (b, d) the tie-break hands the
    outcome to b and d.
    """
    projects = tuple(
        ProjectSpec(id=pid, name=pid.upper(), cost=2 if pid == "a" else 1)
        for pid in ("a", "b", "c", "d", "e")
    )
    tie = TieBreakOrder.from_project_order(projects, ["b", "d", "c", "e", "a"])
    config = ElectionConfig(projects=projects, budget=2, tie_break=tie)
    truthful = [
        Ballot("1", KnapsackBallot(Allocation.of({"a": 2}))),
        Ballot("2", KnapsackBallot(Allocation.of({"a": 2}))),
        Ballot("3", KnapsackBallot(Allocation.of({"b": 1, "c": 1}))),
        Ballot("4", KnapsackBallot(Allocation.of({"d": 1, "e": 1}))),
    ]
    return config, truthful


def group_manipulation_demo() -> dict:
    """Reproduce the coalition counterexample and confirm no single voter
    can gain alone (truthful dominance binds coalitions of one)."""
    config, truthful = group_manipulation_instance()
    truthful_outcome = knapsack_tally(truthful, config)
    coalition_vote = KnapsackBallot(Allocation.of({"b": 1, "d": 1}))
    manipulated = truthful[:2] + [
        Ballot("3", coalition_vote),
        Ballot("4", coalition_vote),
    ]
    manipulated_outcome = knapsack_tally(manipulated, config)
    ideals = {b.voter_id: b.payload.allocation for b in truthful}
    single_deviations = {}
    for voter in ("3", "4"):
        others = tuple(b for b in truthful if b.voter_id != voter)
        instance = StrategyInstance(
            config=config,
            other_ballots=others,
            focal_model=UtilityModel.overlap(),
            focal_ideal=ideals[voter],
        )
        _, best_utility = best_response(instance, KnapsackRule())
        truthful_utility = overlap_utility(truthful_outcome.allocation, ideals[voter])
        single_deviations[voter] = {
            "truthful_utility": truthful_utility,
            "best_response_utility": int(best_utility),
            "gains": bool(best_utility > truthful_utility),
        }
    return {
        "check": "group-manipulation",
        "config": config.to_json_dict(),
        "truthful_outcome": truthful_outcome.allocation.as_dict(),
        "coalition_outcome": manipulated_outcome.allocation.as_dict(),
        "coalition_utilities": {
            voter: overlap_utility(manipulated_outcome.allocation, ideals[voter])
            for voter in ("3", "4")
        },
        "truthful_utilities": {
            voter: overlap_utility(truthful_outcome.allocation, ideals[voter])
            for voter in ("3", "4")
        },
        "single_deviations": single_deviations,
    }
