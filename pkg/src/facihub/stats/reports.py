"""Inferential report tables for the two evaluation goals, plus the
post-level balance diagnostics.

Goal 1 (paired, within-learner): Shapiro-Wilk gates each index's paired
differences into a paired t test (normal) or a Wilcoxon signed-rank test,
one-tailed for the directional hypothesis that the with-condition is
higher. Goal 2 (independent groups): one-tailed Mann-Whitney U comparing
direct-interaction against co-presence learners. Raw p-values are BH-
adjusted across the nine indices within each goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from statistics import median
from typing import Mapping, Sequence

from ..errors import AnalysisError, DegenerateSampleError, EngineError, SampleSizeError
from ..presence import INDEX_ORDER, PresenceIndexVector
from .adjust import bh_adjust
from .rank_tests import mann_whitney_u, paired_t, wilcoxon_signed_rank
from .shapiro import shapiro_wilk

GOAL1, GOAL2 = "goal1_paired", "goal2_independent"


@dataclass(frozen=True)
class GoalReportRow:
    indicator: str
    columns: dict[str, object]

    def get(self, name: str):
        return self.columns.get(name)


@dataclass(frozen=True)
class GoalReport:
    goal: str
    column_names: list[str]
    rows: list[GoalReportRow]
    metadata: dict[str, object] = field(default_factory=dict)

    def to_tsv(self) -> str:
        lines = ["\t".join(self.column_names)]
        for row in self.rows:
            lines.append("\t".join(_format_cell(row.columns.get(c))
                                    for c in self.column_names))
        return "\n".join(lines) + "\n"


def _format_cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _index_value(vector, name: str) -> float:
    if isinstance(vector, PresenceIndexVector):
        return vector[name]
    try:
        return float(vector[name])
    except (KeyError, TypeError) as exc:
        raise EngineError(f"input vector is missing index column {name!r}") from exc


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


GOAL1_COLUMNS = ["indicator", "m_without", "m_with", "delta_m",
                 "test", "effect_size", "p", "p_bh"]
GOAL2_COLUMNS = ["indicator", "m_co", "m_direct", "mdn_co", "mdn_direct",
                 "delta_m", "effect_size", "p", "p_bh"]


def run_goal_analysis(goal: str,
                      learner_means,
                      modes: Mapping[str, str] | None = None,
                      alpha: float = 0.05,
                      metadata: dict | None = None) -> GoalReport:
    """Build the nine-index report table for one evaluation goal.

    goal1_paired expects `learner_means` as a mapping
    (learner_id, condition) -> index vector with conditions "with_pca" /
    "without_pca"; only learners present in both conditions enter the
    paired analysis. goal2_independent additionally needs `modes`,
    learner_id -> "direct" | "co_presence", and uses with_pca means.

    Indices whose test degenerates are reported with test="degenerate" and
    excluded from the BH family.
    """
    if goal == GOAL1:
        return _goal1(learner_means, alpha, metadata or {})
    if goal == GOAL2:
        if modes is None:
            raise ValueError("goal2_independent requires interaction-mode labels")
        return _goal2(learner_means, modes, alpha, metadata or {})
    raise ValueError(f"goal must be {GOAL1!r} or {GOAL2!r}, got {goal!r}")


def _paired_rows(learner_means) -> list[tuple[object, object]]:
    with_by_learner: dict[str, object] = {}
    without_by_learner: dict[str, object] = {}
    for (learner_id, condition), vector in learner_means.items():
        if condition == "with_pca":
            with_by_learner[learner_id] = vector
        elif condition == "without_pca":
            without_by_learner[learner_id] = vector
        else:
            raise ValueError(f"unknown condition {condition!r}")
    paired = []
    for learner_id in sorted(set(with_by_learner) & set(without_by_learner)):
        paired.append((with_by_learner[learner_id], without_by_learner[learner_id]))
    return paired


def _goal1(learner_means, alpha: float, metadata: dict) -> GoalReport:
    paired = _paired_rows(learner_means)
    if not paired:
        raise AnalysisError("no learner appears in both conditions")
    rows: list[GoalReportRow] = []
    raw_ps: list[float] = []
    p_slots: list[int] = []
    for name in INDEX_ORDER:
        with_vals = [_index_value(w, name) for w, _ in paired]
        without_vals = [_index_value(wo, name) for _, wo in paired]
        diffs = [w - wo for w, wo in zip(with_vals, without_vals)]
        columns: dict[str, object] = {
            "indicator": name,
            "m_without": _mean(without_vals),
            "m_with": _mean(with_vals),
            "delta_m": _mean(diffs),
        }
        try:
            result, test_name = _gate_and_test(diffs, alpha)
            columns["test"] = test_name
            columns["effect_size"] = _effect_cell(result)
            columns["p"] = result.p_value
            p_slots.append(len(rows))
            raw_ps.append(result.p_value)
        except (DegenerateSampleError, SampleSizeError) as exc:
            columns["test"] = "degenerate"
            columns["effect_size"] = None
            columns["p"] = None
            columns["error"] = str(exc)
        columns["p_bh"] = None
        rows.append(GoalReportRow(indicator=name, columns=columns))
    _fill_bh(rows, raw_ps, p_slots)
    meta = {"n_pairs": len(paired), "alpha": alpha,
            "direction": "H1: with_pca > without_pca", **metadata}
    return GoalReport(goal=GOAL1, column_names=GOAL1_COLUMNS, rows=rows, metadata=meta)


def _gate_and_test(diffs: list[float], alpha: float):
    """Shapiro-Wilk normality gate, then paired t or Wilcoxon, one-tailed."""
    if len(diffs) < 3:
        raise SampleSizeError(f"paired analysis needs >= 3 pairs, got {len(diffs)}")
    try:
        _, sw_p = shapiro_wilk(diffs)
        normal = sw_p > alpha
    except DegenerateSampleError:
        normal = False  # constant differences: the t test would degenerate too
    if normal:
        return paired_t(diffs, "one_tailed_greater"), "paired_t"
    return wilcoxon_signed_rank(diffs, "one_tailed_greater"), "wilcoxon"


def _goal2(learner_means, modes: Mapping[str, str], alpha: float,
           metadata: dict) -> GoalReport:
    direct_vectors = []
    co_vectors = []
    for learner_id, mode in sorted(modes.items()):
        vector = learner_means.get((learner_id, "with_pca"))
        if vector is None:
            continue
        if mode == "direct":
            direct_vectors.append(vector)
        elif mode == "co_presence":
            co_vectors.append(vector)
        else:
            raise ValueError(f"unknown interaction mode {mode!r}")
    if not direct_vectors or not co_vectors:
        raise AnalysisError("both interaction-mode groups must be non-empty")
    rows: list[GoalReportRow] = []
    raw_ps: list[float] = []
    p_slots: list[int] = []
    for name in INDEX_ORDER:
        direct_vals = [_index_value(v, name) for v in direct_vectors]
        co_vals = [_index_value(v, name) for v in co_vectors]
        columns: dict[str, object] = {
            "indicator": name,
            "m_co": _mean(co_vals),
            "m_direct": _mean(direct_vals),
            "mdn_co": float(median(co_vals)),
            "mdn_direct": float(median(direct_vals)),
            "delta_m": _mean(direct_vals) - _mean(co_vals),
        }
        try:
            result = mann_whitney_u(direct_vals, co_vals, "one_tailed_greater")
            columns["effect_size"] = _effect_cell(result)
            columns["p"] = result.p_value
            p_slots.append(len(rows))
            raw_ps.append(result.p_value)
        except (DegenerateSampleError, SampleSizeError) as exc:
            columns["effect_size"] = None
            columns["p"] = None
            columns["error"] = str(exc)
        columns["p_bh"] = None
        rows.append(GoalReportRow(indicator=name, columns=columns))
    _fill_bh(rows, raw_ps, p_slots)
    meta = {"n_direct": len(direct_vectors), "n_co_presence": len(co_vectors),
            "alpha": alpha, "direction": "H2: direct > co_presence",
            "effect_size_n": "total group size", **metadata}
    return GoalReport(goal=GOAL2, column_names=GOAL2_COLUMNS, rows=rows, metadata=meta)


def _effect_cell(result) -> str:
    label = "d" if result.effect_size.kind == "cohen_d" else "r"
    return f"{label}={result.effect_size.value:.3f}"


def _fill_bh(rows: list[GoalReportRow], raw_ps: list[float], p_slots: list[int]) -> None:
    if not raw_ps:
        return
    adjusted = bh_adjust(raw_ps).adjusted
    for slot, p_bh in zip(p_slots, adjusted):
        rows[slot].columns["p_bh"] = p_bh


# -- balance diagnostics -------------------------------------------------------


@dataclass(frozen=True)
class BalanceRow:
    metric: str
    value_without: float
    value_with: float

    @property
    def difference(self) -> float:
        return self.value_with - self.value_without


@dataclass(frozen=True)
class BalanceTable:
    rows: list[BalanceRow]

    def to_tsv(self) -> str:
        lines = ["metric\tvalue_without\tvalue_with\tdifference"]
        for row in self.rows:
            lines.append(f"{row.metric}\t{row.value_without:.6g}"
                         f"\t{row.value_with:.6g}\t{row.difference:.6g}")
        return "\n".join(lines) + "\n"


def _posting_hour(ts: datetime) -> float:
    return ts.hour + ts.minute / 60.0 + ts.second / 3600.0


def balance_check(posts: Sequence[tuple[str, str, datetime, float | None]]) -> BalanceTable:
    """Condition balance over focal posts: mean posting hour and the
    mean/median of focal-post centrality, with with-minus-without columns.

    `posts` rows are (post_id, condition, timestamp, centrality); centrality
    may be None for posts never scored by the network trigger.
    """
    by_condition: dict[str, list[tuple[str, datetime, float | None]]] = {
        "with_pca": [], "without_pca": []}
    for post_id, condition, ts, centrality in posts:
        if condition not in by_condition:
            raise ValueError(f"unknown condition {condition!r}")
        by_condition[condition].append((post_id, ts, centrality))
    if not by_condition["with_pca"] or not by_condition["without_pca"]:
        raise AnalysisError("balance check needs posts in both conditions")

    def hour_mean(group):
        return _mean([_posting_hour(ts) for _, ts, _ in group])

    def centrality_values(group):
        return [c for _, _, c in group if c is not None]

    with_group = by_condition["with_pca"]
    without_group = by_condition["without_pca"]
    rows = [BalanceRow("mean_posting_hour",
                       hour_mean(without_group), hour_mean(with_group))]
    c_with = centrality_values(with_group)
    c_without = centrality_values(without_group)
    if c_with and c_without:
        rows.append(BalanceRow("mean_centrality", _mean(c_without), _mean(c_with)))
        rows.append(BalanceRow("median_centrality",
                               float(median(c_without)), float(median(c_with))))
    return BalanceTable(rows=rows)
