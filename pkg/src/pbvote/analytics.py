"""Result analytics: winning-cost summaries and cost-cumulative curves.

These back the CLI's TSV tables and the service's result diagnostics;
plotting is left to external tools.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .model import Ballot, ElectionConfig, KApprovalBallot, KnapsackBallot
from .tally import Outcome


def winning_projects(outcome: Outcome, config: ElectionConfig) -> frozenset[str]:
    """The outcome's fully funded projects.

    Project-level rules report their funded list; for per-dollar outcomes a
    project wins when its allocation reaches the cost cap, so partially
    funded projects are excluded.
    """
    if outcome.funded_projects is not None:
        return frozenset(outcome.funded_projects)
    return frozenset(
        pid for pid, w in outcome.allocation.amounts if w == config.project(pid).cost
    )


def average_winning_cost(funded: frozenset[str], config: ElectionConfig) -> Fraction | None:
    """Mean winning-project cost as a fraction of the budget."""
    if not funded or config.budget == 0:
        return None
    total = sum(config.project(pid).cost for pid in funded)
    return Fraction(total, len(funded) * config.budget)


def votes_per_project(
    ballots: Sequence[Ballot], config: ElectionConfig, method: str
) -> dict[str, int]:
    """Vote mass per project: approvals for project-level methods, total
    allocated dollars for per-dollar methods."""
    totals = {pid: 0 for pid in config.project_ids()}
    if method in ("kapproval", "integral", "approx-integral"):
        for b in ballots:
            if isinstance(b.payload, KApprovalBallot):
                for pid in b.payload.approved:
                    totals[pid] += 1
    else:
        for b in ballots:
            if isinstance(b.payload, KnapsackBallot):
                for pid, w in b.payload.allocation.amounts:
                    totals[pid] += w
    return totals


def cost_cumulative_rows(
    votes: Mapping[str, int], config: ElectionConfig
) -> list[dict]:
    """Projects in descending cost order with the cumulative fraction of all
    votes carried by projects at or above each cost."""
    total = sum(votes.values())
    rows = []
    running = 0
    order = sorted(config.projects, key=lambda p: (-p.cost, p.id))
    for p in order:
        running += votes.get(p.id, 0)
        rows.append(
            {
                "project": p.id,
                "cost": p.cost,
                "votes": votes.get(p.id, 0),
                "cumulative_vote_fraction": (running / total) if total else 0.0,
            }
        )
    return rows


def cost_cumulative_tsv(rows: Sequence[Mapping]) -> str:
    header = "project\tcost\tvotes\tcumulative_vote_fraction"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['project']}\t{r['cost']}\t{r['votes']}\t{r['cumulative_vote_fraction']:.6f}"
        )
    return "\n".join(lines) + "\n"
