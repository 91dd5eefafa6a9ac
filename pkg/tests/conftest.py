import pytest

from pbvote.model import (
    Allocation,
    Ballot,
    ElectionConfig,
    KnapsackBallot,
    ProjectSpec,
    TieBreakOrder,
)


@pytest.fixture
def three_project_config() -> ElectionConfig:
    """Budget 10 over caps (5, 5, 10)."""
    return ElectionConfig(
        projects=(
            ProjectSpec("P1", "Project 1", 5),
            ProjectSpec("P2", "Project 2", 5),
            ProjectSpec("P3", "Project 3", 10),
        ),
        budget=10,
    )


@pytest.fixture
def three_project_ballots(three_project_config) -> list[Ballot]:
    """Ideals (4,5,1), (3,5,2), (0,0,10)."""
    return [
        Ballot("A", KnapsackBallot(Allocation.of({"P1": 4, "P2": 5, "P3": 1}))),
        Ballot("B", KnapsackBallot(Allocation.of({"P1": 3, "P2": 5, "P3": 2}))),
        Ballot("C", KnapsackBallot(Allocation.of({"P3": 10}))),
    ]


@pytest.fixture
def street_config() -> ElectionConfig:
    """Budget 300 over costs (A: 300, B: 200, C: 100)."""
    return ElectionConfig(
        projects=(
            ProjectSpec("A", "Project A", 300),
            ProjectSpec("B", "Project B", 200),
            ProjectSpec("C", "Project C", 100),
        ),
        budget=300,
    )


@pytest.fixture
def integral_config() -> ElectionConfig:
    """Budget 5 over costs (a: 2, b: 2, c: 3); ties favor the larger cost."""
    projects = (
        ProjectSpec("a", "a", 2),
        ProjectSpec("b", "b", 2),
        ProjectSpec("c", "c", 3),
    )
    tie = TieBreakOrder.from_project_order(projects, ["c", "a", "b"])
    return ElectionConfig(projects=projects, budget=5, tie_break=tie)


@pytest.fixture
def approval_five_config() -> ElectionConfig:
    """Budget 400, costs (200, 100, 100, 100, 200), ties e, d, c, b, a."""
    projects = (
        ProjectSpec("a", "a", 200),
        ProjectSpec("b", "b", 100),
        ProjectSpec("c", "c", 100),
        ProjectSpec("d", "d", 100),
        ProjectSpec("e", "e", 200),
    )
    tie = TieBreakOrder.from_project_order(projects, ["e", "d", "c", "b", "a"])
    return ElectionConfig(projects=projects, budget=400, tie_break=tie)
