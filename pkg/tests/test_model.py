import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbvote.model import (
    Allocation,
    Ballot,
    ConsistencyError,
    ElectionConfig,
    KnapsackBallot,
    ProjectSpec,
    SubprojectId,
    TieBreakOrder,
    ValidationError,
    ballot_from_json_dict,
    ballot_to_json_dict,
    collapse_per_dollar,
    expand_per_dollar,
    validate_ballot,
)


def sub(p, t):
    return SubprojectId(p, t)


class TestExpansion:
    def test_first_dollars_get_the_votes(self, three_project_config):
        got = expand_per_dollar(Allocation.of({"P1": 4}), three_project_config)
        assert got == frozenset(sub("P1", t) for t in range(1, 5))

    def test_zero_allocation_is_empty(self, three_project_config):
        assert expand_per_dollar(Allocation.of({}), three_project_config) == frozenset()

    def test_size_matches_total_and_skips_unfunded(self, three_project_config):
        got = expand_per_dollar(Allocation.of({"P1": 5, "P2": 5}), three_project_config)
        assert len(got) == 10
        assert not any(s.project == "P3" for s in got)

    def test_rejects_amounts_over_cap(self, three_project_config):
        with pytest.raises(ValidationError, match="P1"):
            expand_per_dollar(Allocation.of({"P1": 6}), three_project_config)


class TestCollapse:
    def test_counts_per_project(self, three_project_config):
        subset = (
            {sub("P2", t) for t in range(1, 6)}
            | {sub("P1", t) for t in range(1, 4)}
            | {sub("P3", 1), sub("P3", 2)}
        )
        got = collapse_per_dollar(subset, three_project_config)
        assert got == Allocation.of({"P1": 3, "P2": 5, "P3": 2})

    def test_empty_set(self, three_project_config):
        assert collapse_per_dollar(frozenset(), three_project_config) == Allocation.of({})

    def test_gap_is_rejected(self, three_project_config):
        with pytest.raises(ConsistencyError):
            collapse_per_dollar({sub("P1", 2)}, three_project_config)


@given(
    st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=4).flatmap(
        lambda caps: st.tuples(
            st.just(caps),
            st.tuples(*(st.integers(min_value=0, max_value=c) for c in caps)),
        )
    )
)
def test_expand_collapse_round_trip(caps_amounts):
    caps, amounts = caps_amounts
    config = ElectionConfig(
        projects=tuple(ProjectSpec(f"p{i}", f"p{i}", c) for i, c in enumerate(caps)),
        budget=0,
    )
    allocation = Allocation.of({f"p{i}": w for i, w in enumerate(amounts)})
    assert collapse_per_dollar(expand_per_dollar(allocation, config), config) == allocation


class TestTieBreakOrder:
    def test_default_is_config_order(self, three_project_config):
        order = three_project_config.tie_break.order
        assert order[0] == sub("P1", 1)
        assert order[5] == sub("P2", 1)
        assert three_project_config.tie_break_projects() == ("P1", "P2", "P3")

    def test_inconsistent_order_rejected(self):
        with pytest.raises(ConsistencyError):
            TieBreakOrder((sub("x", 2), sub("x", 1)))

    def test_interleaved_consistent_order_allowed(self):
        TieBreakOrder((sub("x", 1), sub("y", 1), sub("x", 2), sub("y", 2)))

    def test_must_cover_all_subprojects(self):
        projects = (ProjectSpec("x", "x", 2),)
        with pytest.raises(ValidationError):
            ElectionConfig(projects=projects, budget=1, tie_break=TieBreakOrder((sub("x", 1),)))


class TestConfigValidation:
    def test_budget_above_capacity_rejected(self):
        with pytest.raises(ValidationError, match="capacity"):
            ElectionConfig(projects=(ProjectSpec("x", "x", 2),), budget=3)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValidationError, match="unique"):
            ElectionConfig(
                projects=(ProjectSpec("x", "x", 2), ProjectSpec("x", "y", 1)), budget=1
            )

    def test_balanced_needs_both_kinds(self):
        with pytest.raises(ValidationError, match="revenue"):
            ElectionConfig(
                projects=(ProjectSpec("x", "x", 2),), mode="balanced-budget"
            )

    def test_cost_must_be_positive(self):
        with pytest.raises(ValidationError):
            ProjectSpec("x", "x", 0)

    def test_config_json_round_trip(self, integral_config):
        data = json.loads(json.dumps(integral_config.to_json_dict()))
        again = ElectionConfig.from_json_dict(data)
        assert again == integral_config


class TestBallotValidation:
    def test_complete_ballot_accepted(self, three_project_config):
        ballot = Ballot("v", KnapsackBallot(Allocation.of({"P1": 5, "P2": 5})))
        validate_ballot(ballot, three_project_config)

    def test_underfull_ballot_rejected_not_padded(self, three_project_config):
        ballot = Ballot("v", KnapsackBallot(Allocation.of({"P1": 5, "P2": 4})))
        with pytest.raises(ValidationError, match="budget not fully allocated"):
            validate_ballot(ballot, three_project_config)

    def test_overfull_ballot_rejected(self, three_project_config):
        ballot = Ballot("v", KnapsackBallot(Allocation.of({"P1": 5, "P2": 5, "P3": 1})))
        with pytest.raises(ValidationError):
            validate_ballot(ballot, three_project_config)

    def test_error_names_voter(self, three_project_config):
        ballot = Ballot("alice", KnapsackBallot(Allocation.of({"P1": 1})))
        with pytest.raises(ValidationError, match="alice"):
            validate_ballot(ballot, three_project_config)

    def test_ballot_json_round_trip(self):
        ballot = Ballot("v", KnapsackBallot(Allocation.of({"P1": 2, "P3": 8})))
        assert ballot_from_json_dict(ballot_to_json_dict(ballot)) == ballot


class TestAllocation:
    def test_canonical_form_ignores_zeros_and_order(self):
        a = Allocation.of({"b": 1, "a": 2, "c": 0})
        b = Allocation.of({"a": 2, "b": 1})
        assert a == b
        assert a.get("c") == 0
        assert a.total() == 3

    def test_negative_amounts_rejected(self):
        with pytest.raises(ValidationError):
            Allocation.of({"a": -1})
