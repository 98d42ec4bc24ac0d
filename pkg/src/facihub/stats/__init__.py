"""Inferential statistics for the evaluation pipeline."""

from .adjust import AdjustedPValues, bh_adjust
from .permutation import PermutationResult, permutation_sensitivity
from .rank_tests import (EXACT_THRESHOLD, EffectSize, TestResult,
                         mann_whitney_u, paired_t, wilcoxon_signed_rank)
from .reports import (GOAL1, GOAL2, BalanceRow, BalanceTable, GoalReport,
                      GoalReportRow, balance_check, run_goal_analysis)
from .shapiro import shapiro_wilk

__all__ = [
    "AdjustedPValues", "bh_adjust",
    "PermutationResult", "permutation_sensitivity",
    "EXACT_THRESHOLD", "EffectSize", "TestResult",
    "mann_whitney_u", "paired_t", "wilcoxon_signed_rank",
    "GOAL1", "GOAL2", "BalanceRow", "BalanceTable", "GoalReport",
    "GoalReportRow", "balance_check", "run_goal_analysis",
    "shapiro_wilk",
]
