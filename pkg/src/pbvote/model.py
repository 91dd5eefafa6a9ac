"""Domain types for per-dollar budget elections.

Everything downstream (tallies, strategy analysis, the ballot service) is
built on the types here: projects with integer dollar caps, allocations of
whole dollars to projects, and the expansion of an allocation into its
individual dollar subprojects.

All types are immutable values; dollars are the atomic unit throughout.
Configs may declare a ``unit`` scale factor (e.g. $1,000) that applies to
display only, never to arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

EXPENDITURE = "expenditure"
REVENUE = "revenue"

FIXED_BUDGET = "fixed-budget"
BALANCED_BUDGET = "balanced-budget"
DEFICIT_AUGMENTED = "deficit-augmented"

MODES = (FIXED_BUDGET, BALANCED_BUDGET, DEFICIT_AUGMENTED)

#: Reserved id for the synthetic revenue item used by the deficit-augmented rule.
DEFICIT_PROJECT_ID = "deficit"


class PBError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PBError, ValueError):
    """A config or ballot violates one of its invariants."""


class ConsistencyError(ValidationError):
    """A subproject set has a gap: dollar t present without dollar t-1."""


class EnumerationLimitError(PBError):
    """A brute-force search space exceeds the configured limit.

    Carries ``estimate``, the exact size of the refused search space, so
    callers can report it.
    """

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


class UndefinedScoreError(PBError):
    """A score is requested outside its domain (e.g. empty funded set)."""


@dataclass(frozen=True)
class ProjectSpec:
    """A ballot item with an integral dollar cost cap."""

    id: str
    name: str
    cost: int
    kind: str = EXPENDITURE

    def __post_init__(self):
        if not self.id:
            raise ValidationError("project id must be non-empty")
        if not isinstance(self.cost, int) or self.cost < 1:
            raise ValidationError(f"project {self.id!r}: cost must be an integer >= 1")
        if self.kind not in (EXPENDITURE, REVENUE):
            raise ValidationError(f"project {self.id!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True, order=True)
class SubprojectId:
    """One dollar of one project: ``dollar_index`` runs 1..cost."""

    project: str
    dollar_index: int


@dataclass(frozen=True)
class Allocation:
    """Per-project whole-dollar amounts; unmentioned projects are 0.

    Stored in canonical form (sorted by project id, zero amounts dropped)
    so equality and hashing behave as expected.
    """

    amounts: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(amounts: Union[Mapping[str, int], Iterable[tuple[str, int]]]) -> "Allocation":
        items = dict(amounts)
        for pid, w in items.items():
            if not isinstance(w, int) or w < 0:
                raise ValidationError(f"allocation for {pid!r} must be a non-negative integer")
        return Allocation(tuple(sorted((p, w) for p, w in items.items() if w != 0)))

    def get(self, project_id: str) -> int:
        for pid, w in self.amounts:
            if pid == project_id:
                return w
        return 0

    def total(self) -> int:
        return sum(w for _, w in self.amounts)

    def support(self) -> frozenset[str]:
        return frozenset(pid for pid, _ in self.amounts)

    def as_dict(self) -> dict[str, int]:
        return dict(self.amounts)

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}:{w}" for p, w in self.amounts)
        return f"Allocation({inner})"


EMPTY_ALLOCATION = Allocation()


@dataclass(frozen=True)
class TieBreakOrder:
    """A strict total order over all subprojects of an election.

    Consistency invariant: within each project, dollar t' precedes dollar t
    whenever t' < t. Checked in O(C) at construction.
    """

    order: tuple[SubprojectId, ...]

    @cached_property
    def position(self) -> dict[SubprojectId, int]:
        return {sub: i for i, sub in enumerate(self.order)}

    def __post_init__(self):
        last_index: dict[str, int] = {}
        seen = set()
        for sub in self.order:
            if sub in seen:
                raise ValidationError(f"tie-break order repeats {sub}")
            seen.add(sub)
            prev = last_index.get(sub.project, 0)
            if sub.dollar_index != prev + 1:
                raise ConsistencyError(
                    f"tie-break order lists dollar {sub.dollar_index} of "
                    f"{sub.project!r} before dollar {prev + 1}"
                )
            last_index[sub.project] = sub.dollar_index

    @staticmethod
    def default(projects: Sequence[ProjectSpec]) -> "TieBreakOrder":
        """Projects in config order, dollar indices ascending within each."""
        return TieBreakOrder.from_project_order(projects, [p.id for p in projects])

    @staticmethod
    def from_project_order(
        projects: Sequence[ProjectSpec], project_ids: Sequence[str]
    ) -> "TieBreakOrder":
        by_id = {p.id: p for p in projects}
        if sorted(project_ids) != sorted(by_id):
            raise ValidationError("tie-break project order must list every project exactly once")
        order = tuple(
            SubprojectId(pid, t)
            for pid in project_ids
            for t in range(1, by_id[pid].cost + 1)
        )
        return TieBreakOrder(order)

    def project_order(self) -> tuple[str, ...]:
        """Project-level order derived from each project's first dollar."""
        seen: list[str] = []
        for sub in self.order:
            if sub.project not in seen:
                seen.append(sub.project)
        return tuple(seen)

    def validate_against(self, projects: Sequence[ProjectSpec]) -> None:
        expected = sum(p.cost for p in projects)
        if len(self.order) != expected:
            raise ValidationError(
                f"tie-break order covers {len(self.order)} subprojects, expected {expected}"
            )
        caps = {p.id: p.cost for p in projects}
        for sub in self.order:
            cap = caps.get(sub.project)
            if cap is None:
                raise ValidationError(f"tie-break order mentions unknown project {sub.project!r}")
            if not 1 <= sub.dollar_index <= cap:
                raise ValidationError(
                    f"tie-break order: dollar {sub.dollar_index} outside cap of {sub.project!r}"
                )


@dataclass(frozen=True)
class DollarLayout:
    """Flat indexing of one side's subprojects: config order, dollars ascending."""

    project_ids: tuple[str, ...]
    caps: tuple[int, ...]

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for c in self.caps:
            out.append(acc)
            acc += c
        return tuple(out)

    @property
    def size(self) -> int:
        return sum(self.caps)

    @cached_property
    def index(self) -> dict[str, int]:
        return {pid: i for i, pid in enumerate(self.project_ids)}

    @staticmethod
    def for_projects(projects: Sequence[ProjectSpec]) -> "DollarLayout":
        return DollarLayout(tuple(p.id for p in projects), tuple(p.cost for p in projects))

    def caps_array(self) -> np.ndarray:
        return np.asarray(self.caps, dtype=np.int64)

    def subproject(self, flat: int) -> SubprojectId:
        for i in range(len(self.project_ids) - 1, -1, -1):
            if flat >= self.offsets[i]:
                return SubprojectId(self.project_ids[i], flat - self.offsets[i] + 1)
        raise IndexError(flat)

    def subprojects(self) -> Iterator[SubprojectId]:
        for pid, cap in zip(self.project_ids, self.caps):
            for t in range(1, cap + 1):
                yield SubprojectId(pid, t)

    def rank_for(self, tie_break: TieBreakOrder) -> np.ndarray:
        """Tie-break position of every flat subproject (lower wins ties)."""
        pos = tie_break.position
        return np.asarray([pos[sub] for sub in self.subprojects()], dtype=np.int64)

    def vector(self, allocation: Allocation) -> np.ndarray:
        vec = np.zeros(len(self.project_ids), dtype=np.int64)
        for pid, w in allocation.amounts:
            i = self.index.get(pid)
            if i is None:
                raise ValidationError(f"allocation mentions unknown project {pid!r}")
            if w > self.caps[i]:
                raise ValidationError(
                    f"allocation gives {w} to {pid!r}, above its cap of {self.caps[i]}"
                )
            vec[i] = w
        return vec

    def allocation(self, vector: Sequence[int]) -> Allocation:
        return Allocation.of({pid: int(w) for pid, w in zip(self.project_ids, vector)})


@dataclass(frozen=True)
class ElectionConfig:
    """Projects, budget, mode, and the tie-break order of one election."""

    projects: tuple[ProjectSpec, ...]
    budget: int = 0
    mode: str = FIXED_BUDGET
    tie_break: TieBreakOrder = None  # type: ignore[assignment]  # defaulted below
    unit: int = 1

    def __post_init__(self):
        if not self.projects:
            raise ValidationError("an election needs at least one project")
        ids = [p.id for p in self.projects]
        if len(set(ids)) != len(ids):
            raise ValidationError("project ids must be unique within an election")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}")
        if not isinstance(self.budget, int) or self.budget < 0:
            raise ValidationError("budget must be a non-negative integer")
        if self.unit < 1:
            raise ValidationError("unit must be a positive integer")
        expenditure_total = sum(p.cost for p in self.projects if p.kind == EXPENDITURE)
        if self.mode == FIXED_BUDGET:
            if any(p.kind == REVENUE for p in self.projects):
                raise ValidationError("fixed-budget elections take expenditure projects only")
            if self.budget > expenditure_total:
                raise ValidationError(
                    f"budget {self.budget} exceeds total capacity {expenditure_total}"
                )
        else:
            if expenditure_total == 0:
                raise ValidationError(f"{self.mode} elections need an expenditure project")
            if self.mode == BALANCED_BUDGET and not any(
                p.kind == REVENUE for p in self.projects
            ):
                raise ValidationError("balanced-budget elections need a revenue project")
            if DEFICIT_PROJECT_ID in ids and self.mode == DEFICIT_AUGMENTED:
                raise ValidationError(
                    f"project id {DEFICIT_PROJECT_ID!r} is reserved in deficit-augmented mode"
                )
        if self.tie_break is None:
            object.__setattr__(self, "tie_break", TieBreakOrder.default(self.projects))
        else:
            self.tie_break.validate_against(self.projects)

    def project(self, project_id: str) -> ProjectSpec:
        for p in self.projects:
            if p.id == project_id:
                return p
        raise ValidationError(f"unknown project {project_id!r}")

    def project_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.projects)

    def costs(self) -> dict[str, int]:
        return {p.id: p.cost for p in self.projects}

    @cached_property
    def expenditure_layout(self) -> DollarLayout:
        return DollarLayout.for_projects([p for p in self.projects if p.kind == EXPENDITURE])

    @cached_property
    def revenue_layout(self) -> DollarLayout:
        return DollarLayout.for_projects([p for p in self.projects if p.kind == REVENUE])

    def tie_break_projects(self) -> tuple[str, ...]:
        return self.tie_break.project_order()

    # --- JSON config file -------------------------------------------------

    def to_json_dict(self) -> dict:
        out: dict = {
            "projects": [
                {"id": p.id, "name": p.name, "cost": p.cost, "kind": p.kind}
                for p in self.projects
            ],
            "budget": self.budget,
            "mode": self.mode,
        }
        default_order = tuple(p.id for p in self.projects)
        if self.tie_break.project_order() != default_order or self.tie_break != (
            TieBreakOrder.default(self.projects)
        ):
            out["tie_break"] = list(self.tie_break.project_order())
        if self.unit != 1:
            out["unit"] = self.unit
        return out

    @staticmethod
    def from_json_dict(data: Mapping) -> "ElectionConfig":
        try:
            projects = tuple(
                ProjectSpec(
                    id=str(p["id"]),
                    name=str(p.get("name", p["id"])),
                    cost=p["cost"],
                    kind=p.get("kind", EXPENDITURE),
                )
                for p in data["projects"]
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed config: {exc}") from exc
        tie_break = None
        if "tie_break" in data:
            tie_break = TieBreakOrder.from_project_order(projects, list(data["tie_break"]))
        return ElectionConfig(
            projects=projects,
            budget=int(data.get("budget", 0)),
            mode=data.get("mode", FIXED_BUDGET),
            tie_break=tie_break,
            unit=int(data.get("unit", 1)),
        )


def load_config(path) -> ElectionConfig:
    with open(path, encoding="utf-8") as fh:
        return ElectionConfig.from_json_dict(json.load(fh))


def save_config(config: ElectionConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- ballots ---------------------------------------------------------------


@dataclass(frozen=True)
class KnapsackBallot:
    """A full budget-feasible allocation; balanced modes carry revenue too."""

    allocation: Allocation
    revenue_allocation: Allocation | None = None


@dataclass(frozen=True)
class KApprovalBallot:
    """An approval set, capped at K projects; also the integral vote shape."""

    approved: frozenset[str]

    @staticmethod
    def of(projects: Iterable[str]) -> "KApprovalBallot":
        return KApprovalBallot(frozenset(projects))


@dataclass(frozen=True)
class Comparison:
    pair: tuple[str, str]
    winner: str

    def __post_init__(self):
        if self.winner not in self.pair:
            raise ValidationError(f"winner {self.winner!r} not in pair {self.pair}")
        if self.pair[0] == self.pair[1]:
            raise ValidationError("a comparison needs two distinct projects")

    @property
    def loser(self) -> str:
        return self.pair[1] if self.winner == self.pair[0] else self.pair[0]


@dataclass(frozen=True)
class PairwiseBallot:
    comparisons: tuple[Comparison, ...]


@dataclass(frozen=True)
class RankingBallot:
    ranking: tuple[str, ...]


BallotPayload = Union[KnapsackBallot, KApprovalBallot, PairwiseBallot, RankingBallot]

BALLOT_KINDS = {
    KnapsackBallot: "knapsack",
    KApprovalBallot: "kapproval",
    PairwiseBallot: "pairwise",
    RankingBallot: "ranking",
}


@dataclass(frozen=True)
class Ballot:
    voter_id: str
    payload: BallotPayload

    @property
    def kind(self) -> str:
        return BALLOT_KINDS[type(self.payload)]


def validate_ballot(
    ballot: Ballot,
    config: ElectionConfig,
    *,
    k: int | None = None,
    ranking_limit: int | None = None,
    integral: bool = False,
) -> None:
    """Raise ValidationError naming the violated invariant.

    ``k`` caps approval ballots, ``ranking_limit`` caps ranking ballots, and
    ``integral`` switches approval-shaped ballots to the budget constraint
    (sum of approved costs <= budget) used by the integral rules.
    """
    who = f"voter {ballot.voter_id!r}"
    payload = ballot.payload
    ids = set(config.project_ids())
    if isinstance(payload, KnapsackBallot):
        exp_layout = config.expenditure_layout
        for pid, w in payload.allocation.amounts:
            if pid not in exp_layout.index:
                raise ValidationError(f"{who}: unknown expenditure project {pid!r}")
            if w > config.project(pid).cost:
                raise ValidationError(
                    f"{who}: {pid!r} allocated {w}, above its cap of {config.project(pid).cost}"
                )
        if config.mode == FIXED_BUDGET:
            total = payload.allocation.total()
            if payload.revenue_allocation is not None:
                raise ValidationError(f"{who}: fixed-budget ballots carry no revenue side")
            if total != config.budget:
                raise ValidationError(
                    f"{who}: budget not fully allocated ({total} of {config.budget})"
                )
        else:
            rev = payload.revenue_allocation or EMPTY_ALLOCATION
            rev_layout = config.revenue_layout
            for pid, w in rev.amounts:
                if pid not in rev_layout.index:
                    raise ValidationError(f"{who}: unknown revenue project {pid!r}")
                if w > config.project(pid).cost:
                    raise ValidationError(
                        f"{who}: {pid!r} allocated {w}, above its cap of {config.project(pid).cost}"
                    )
            exp_total, rev_total = payload.allocation.total(), rev.total()
            if config.mode == BALANCED_BUDGET and exp_total != rev_total:
                raise ValidationError(
                    f"{who}: expenditure total {exp_total} != revenue total {rev_total}"
                )
            if config.mode == DEFICIT_AUGMENTED and exp_total < rev_total:
                raise ValidationError(
                    f"{who}: revenue total {rev_total} exceeds expenditure total {exp_total}"
                )
    elif isinstance(payload, KApprovalBallot):
        unknown = payload.approved - ids
        if unknown:
            raise ValidationError(f"{who}: unknown projects {sorted(unknown)}")
        if integral:
            total = sum(config.project(p).cost for p in payload.approved)
            if total > config.budget:
                raise ValidationError(
                    f"{who}: approved costs total {total}, above the budget of {config.budget}"
                )
        elif k is not None and len(payload.approved) > k:
            raise ValidationError(f"{who}: approves {len(payload.approved)} projects, cap is {k}")
    elif isinstance(payload, PairwiseBallot):
        for comp in payload.comparisons:
            if set(comp.pair) - ids:
                raise ValidationError(f"{who}: comparison mentions unknown project")
    elif isinstance(payload, RankingBallot):
        if len(set(payload.ranking)) != len(payload.ranking):
            raise ValidationError(f"{who}: ranking repeats a project")
        unknown = set(payload.ranking) - ids
        if unknown:
            raise ValidationError(f"{who}: unknown projects {sorted(unknown)}")
        if ranking_limit is not None and len(payload.ranking) > ranking_limit:
            raise ValidationError(
                f"{who}: ranks {len(payload.ranking)} projects, cap is {ranking_limit}"
            )
    else:
        raise ValidationError(f"{who}: unknown ballot payload {type(payload).__name__}")


# --- per-dollar expansion ----------------------------------------------------


def expand_per_dollar(allocation: Allocation, config: ElectionConfig) -> frozenset[SubprojectId]:
    """Split an allocation into its dollar subprojects: {(p, t) : t <= w_p}.

    The result is prefix-closed per project by construction and its size is
    the allocation total.
    """
    out = []
    for pid, w in allocation.amounts:
        cap = config.project(pid).cost
        if w > cap:
            raise ValidationError(f"allocation gives {w} to {pid!r}, above its cap of {cap}")
        out.extend(SubprojectId(pid, t) for t in range(1, w + 1))
    return frozenset(out)


def collapse_per_dollar(subset: Iterable[SubprojectId], config: ElectionConfig) -> Allocation:
    """Inverse of expansion; rejects sets with a gap in any project's prefix."""
    by_project: dict[str, set[int]] = {}
    for sub in subset:
        cap = config.project(sub.project).cost
        if not 1 <= sub.dollar_index <= cap:
            raise ValidationError(
                f"dollar {sub.dollar_index} outside the cap of {sub.project!r}"
            )
        by_project.setdefault(sub.project, set()).add(sub.dollar_index)
    amounts = {}
    for pid, indices in by_project.items():
        w = len(indices)
        if indices != set(range(1, w + 1)):
            raise ConsistencyError(
                f"subproject set for {pid!r} is not prefix-closed (gap below dollar {max(indices)})"
            )
        amounts[pid] = w
    return Allocation.of(amounts)


# --- ballot log (JSON lines) -------------------------------------------------


def ballot_to_json_dict(ballot: Ballot) -> dict:
    payload = ballot.payload
    out: dict = {"voter_id": ballot.voter_id, "kind": ballot.kind}
    if isinstance(payload, KnapsackBallot):
        out["allocation"] = payload.allocation.as_dict()
        if payload.revenue_allocation is not None:
            out["revenue_allocation"] = payload.revenue_allocation.as_dict()
    elif isinstance(payload, KApprovalBallot):
        out["approved"] = sorted(payload.approved)
    elif isinstance(payload, PairwiseBallot):
        out["comparisons"] = [
            {"pair": list(c.pair), "winner": c.winner} for c in payload.comparisons
        ]
    elif isinstance(payload, RankingBallot):
        out["ranking"] = list(payload.ranking)
    return out


def ballot_from_json_dict(data: Mapping) -> Ballot:
    try:
        voter_id = str(data["voter_id"])
        kind = data["kind"]
        if kind == "knapsack":
            rev = data.get("revenue_allocation")
            payload: BallotPayload = KnapsackBallot(
                allocation=Allocation.of({str(k): int(v) for k, v in data["allocation"].items()}),
                revenue_allocation=None
                if rev is None
                else Allocation.of({str(k): int(v) for k, v in rev.items()}),
            )
        elif kind == "kapproval":
            payload = KApprovalBallot(frozenset(str(p) for p in data["approved"]))
        elif kind == "pairwise":
            payload = PairwiseBallot(
                tuple(
                    Comparison(pair=(str(c["pair"][0]), str(c["pair"][1])), winner=str(c["winner"]))
                    for c in data["comparisons"]
                )
            )
        elif kind == "ranking":
            payload = RankingBallot(tuple(str(p) for p in data["ranking"]))
        else:
            raise ValidationError(f"unknown ballot kind {kind!r}")
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed ballot: {exc}") from exc
    return Ballot(voter_id=voter_id, payload=payload)


def read_ballot_log(path) -> list[Ballot]:
    ballots = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            ballots.append(ballot_from_json_dict(data))
    return ballots


def write_ballot_log(ballots: Iterable[Ballot], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ballot in ballots:
            fh.write(json.dumps(ballot_to_json_dict(ballot), sort_keys=True) + "\n")


def fraction_str(value: Fraction) -> str:
    """Exact decimal-free rendering used in JSON output ("2/3", "5")."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
