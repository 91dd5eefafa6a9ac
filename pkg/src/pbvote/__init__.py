"""Participatory-budgeting election engine.

Budget elections where every dollar is a candidate: voters submit complete
allocations, each dollar is scored by how many voters funded it, and the
budget's worth of top dollars wins. Companion rules (approval with a
project cap, integral votes, balanced revenue/expenditure), a brute-force
strategy-analysis suite, pairwise value-for-money comparisons, a noisy-vote
model, an HTTP election service, and a CLI sit on top.
"""

from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .model import (
    Allocation,
    Ballot,
    Comparison,
    ConsistencyError,
    ElectionConfig,
    EnumerationLimitError,
    KApprovalBallot,
    KnapsackBallot,
    PairwiseBallot,
    PBError,
    ProjectSpec,
    RankingBallot,
    SubprojectId,
    TieBreakOrder,
    UndefinedScoreError,
    ValidationError,
    collapse_per_dollar,
    expand_per_dollar,
)
from .tally import (
    Outcome,
    ScoreTable,
    balanced_budget_tally,
    deficit_augmented_tally,
    integral_knapsack_tally,
    kapproval_tally,
    knapsack_tally,
    score_ballots,
)
from .utility import (
    UtilityModel,
    additive_concave_utility,
    balanced_disutility,
    check_equivalence,
    l1_cost,
    overlap_utility,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Ballot",
    "Comparison",
    "ConsistencyError",
    "ElectionConfig",
    "EnumerationLimitError",
    "KApprovalBallot",
    "KnapsackBallot",
    "KERNEL_IMPLEMENTATION",
    "Outcome",
    "PBError",
    "PairwiseBallot",
    "ProjectSpec",
    "RankingBallot",
    "ScoreTable",
    "SubprojectId",
    "TieBreakOrder",
    "UndefinedScoreError",
    "UtilityModel",
    "ValidationError",
    "additive_concave_utility",
    "balanced_budget_tally",
    "balanced_disutility",
    "check_equivalence",
    "collapse_per_dollar",
    "deficit_augmented_tally",
    "expand_per_dollar",
    "integral_knapsack_tally",
    "kapproval_tally",
    "knapsack_tally",
    "l1_cost",
    "overlap_utility",
    "score_ballots",
]
