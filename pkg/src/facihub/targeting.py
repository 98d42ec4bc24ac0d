"""Daily intervention targeting: merge network-structure triggers with
learner-reply triggers, assign alternating focal-post conditions, and emit
the eligible (with-condition) target list.

Condition assignment is persistent and strictly alternating over one
global focal-post sequence sorted by post timestamp; a post keeps its
first-assigned condition forever. Only targets whose root post carries the
with-condition are emitted; the rest are logged in the run manifest.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Sequence

from .hypergraph import build_hypergraph, s_closeness, select_top_targets
from .records import EventStore, format_timestamp, parse_timestamp
from .storage import NdjsonLog

log = logging.getLogger(__name__)

WITH_PCA, WITHOUT_PCA = "with_pca", "without_pca"


@dataclass(frozen=True)
class InterventionTarget:
    target_id: str
    trigger: str  # network | learner_reply
    root_post_id: str
    selected_at: datetime
    centrality: float | None = None


@dataclass(frozen=True)
class ConditionAssignment:
    post_id: str
    condition: str
    sequence_index: int  # 1-based position in the global timestamp order


class ConditionLedger:
    """Persistent odd-even condition assignments for focal posts.

    The parity mapping (odd sequence index -> with or without) is fixed by
    configuration and recorded with every assignment so the original
    deployment's mapping can be swapped.
    """

    def __init__(self, directory: str | Path | None = None,
                 parity_mapping: str = "odd_with"):
        if parity_mapping not in ("odd_with", "odd_without"):
            raise ValueError(f"parity_mapping must be odd_with or odd_without, "
                             f"got {parity_mapping!r}")
        self.parity_mapping = parity_mapping
        base = Path(directory) if directory is not None else None
        self._log = NdjsonLog(base / "assignments.ndjson" if base else None)
        self._assignments: dict[str, ConditionAssignment] = {}
        for raw in self._log.load():
            a = ConditionAssignment(post_id=raw["post_id"], condition=raw["condition"],
                                    sequence_index=raw["sequence_index"])
            self._assignments[a.post_id] = a

    def __len__(self) -> int:
        return len(self._assignments)

    def get(self, post_id: str) -> ConditionAssignment | None:
        return self._assignments.get(post_id)

    def all(self) -> list[ConditionAssignment]:
        return sorted(self._assignments.values(), key=lambda a: a.sequence_index)

    def _condition_for_index(self, index: int) -> str:
        odd = index % 2 == 1
        if self.parity_mapping == "odd_with":
            return WITH_PCA if odd else WITHOUT_PCA
        return WITHOUT_PCA if odd else WITH_PCA

    def assign(self, focal_posts: Sequence[tuple[str, datetime]]) -> list[ConditionAssignment]:
        """Assign conditions for a batch of focal posts.

        New posts are sorted by (timestamp, post_id) and appended to the
        global sequence; already-assigned posts keep their original
        assignment. Returns one assignment per input post, input order
        ignored (sorted output).
        """
        seen: set[str] = set()
        fresh: list[tuple[datetime, str]] = []
        for post_id, ts in focal_posts:
            if post_id in seen:
                raise ValueError(f"duplicate focal post {post_id!r} in batch")
            seen.add(post_id)
            if post_id not in self._assignments:
                fresh.append((ts, post_id))
        next_index = len(self._assignments) + 1
        for ts, post_id in sorted(fresh):
            assignment = ConditionAssignment(
                post_id=post_id,
                condition=self._condition_for_index(next_index),
                sequence_index=next_index)
            self._assignments[post_id] = assignment
            self._log.append({"post_id": post_id, "condition": assignment.condition,
                              "sequence_index": next_index,
                              "parity_mapping": self.parity_mapping,
                              "assigned_for": format_timestamp(ts)})
            next_index += 1
        return sorted((self._assignments[pid] for pid, _ in focal_posts),
                      key=lambda a: a.sequence_index)


def assign_conditions(focal_posts: Sequence[tuple[str, datetime]],
                      parity_mapping: str = "odd_with") -> list[ConditionAssignment]:
    """One-shot condition assignment (fresh sequence; see ConditionLedger
    for the persistent form)."""
    return ConditionLedger(parity_mapping=parity_mapping).assign(focal_posts)


@dataclass(frozen=True)
class TargetCandidate:
    """A pre-filter candidate: emitted only if its root post is with-condition."""

    target: InterventionTarget
    condition: str
    emitted: bool


@dataclass(frozen=True)
class RunManifest:
    as_of: datetime
    window_start: datetime
    window_end: datetime
    n_network: int
    n_learner_reply: int
    n_emitted: int
    n_filtered_out: int
    assignment_delta: int
    candidates: list[TargetCandidate] = field(default_factory=list)


@dataclass(frozen=True)
class TargetingRun:
    manifest: RunManifest
    emitted: list[InterventionTarget]


def _learner_reply_targets(store: EventStore, pca_user_id: str,
                           since: datetime | None, until: datetime,
                           selected_at: datetime) -> list[InterventionTarget]:
    out = []
    for rec in store:
        if rec.action_type != "replied" or rec.actor_id == pca_user_id:
            continue
        if rec.timestamp >= until:
            continue
        if since is not None and rec.timestamp < since:
            continue
        if store.reply_parent_author(rec) == pca_user_id:
            out.append(InterventionTarget(target_id=rec.reply_id,
                                          trigger="learner_reply",
                                          root_post_id=rec.post_id,
                                          selected_at=selected_at))
    return out


def run_daily_targeting(store: EventStore, ledger: ConditionLedger,
                        as_of: datetime, *,
                        window_hours: float = 48.0,
                        fraction: float = 0.05,
                        s: int = 1,
                        pca_user_id: str = "pca",
                        previous_as_of: datetime | None = None) -> TargetingRun:
    """One processing run at `as_of`.

    Network targets come from top-fraction closeness over the activity
    window ending at `as_of`; learner-reply targets are learner replies to
    a published agent contribution since the previous run (whole store on
    first run). Candidates merge with learner_reply provenance winning,
    new root posts receive condition assignments, and only with-condition
    targets are emitted.
    """
    window = (as_of - timedelta(hours=window_hours), as_of)
    h = build_hypergraph(store.records, window)
    table = s_closeness(h, s=s)
    # The agent's own artifacts stay in the hypergraph but are not targets.
    candidate_nodes = [n for n in h.nodes.values()
                       if n.node_type in ("P", "C")
                       and store.artifact_author(n.node_id) != pca_user_id]
    selection = select_top_targets(table, candidate_nodes, fraction=fraction)

    merged: dict[str, InterventionTarget] = {}
    n_network = 0
    for node_id in selection.selected_posts + selection.selected_comments:
        ctx = store.resolve_thread(node_id)
        merged[node_id] = InterventionTarget(
            target_id=node_id, trigger="network",
            root_post_id=ctx.post.post_id, selected_at=as_of,
            centrality=table.scores.get(node_id, 0.0))
        n_network += 1
    replies = _learner_reply_targets(store, pca_user_id, previous_as_of, as_of, as_of)
    n_learner_reply = len(replies)
    for target in replies:
        merged[target.target_id] = target  # learner_reply wins on conflict

    ordered = sorted(merged.values(), key=lambda t: (t.trigger != "learner_reply",
                                                     t.target_id))
    focal: dict[str, datetime] = {}
    for target in ordered:
        if target.root_post_id not in focal:
            created = store.artifact_created_at(target.root_post_id)
            focal[target.root_post_id] = created if created is not None else as_of
    before = len(ledger)
    ledger.assign(sorted(focal.items()))
    assignment_delta = len(ledger) - before

    candidates: list[TargetCandidate] = []
    emitted: list[InterventionTarget] = []
    for target in ordered:
        condition = ledger.get(target.root_post_id).condition
        keep = condition == WITH_PCA
        candidates.append(TargetCandidate(target=target, condition=condition,
                                          emitted=keep))
        if keep:
            emitted.append(target)
        else:
            log.info("target %s filtered out (root %s is %s)",
                     target.target_id, target.root_post_id, condition)
    manifest = RunManifest(as_of=as_of, window_start=window[0], window_end=window[1],
                           n_network=n_network, n_learner_reply=n_learner_reply,
                           n_emitted=len(emitted),
                           n_filtered_out=len(candidates) - len(emitted),
                           assignment_delta=assignment_delta,
                           candidates=candidates)
    return TargetingRun(manifest=manifest, emitted=emitted)


def manifest_to_dict(m: RunManifest) -> dict:
    return {
        "as_of": format_timestamp(m.as_of),
        "window_start": format_timestamp(m.window_start),
        "window_end": format_timestamp(m.window_end),
        "n_network": m.n_network,
        "n_learner_reply": m.n_learner_reply,
        "n_emitted": m.n_emitted,
        "n_filtered_out": m.n_filtered_out,
        "assignment_delta": m.assignment_delta,
        "candidates": [{
            "target_id": c.target.target_id,
            "trigger": c.target.trigger,
            "root_post_id": c.target.root_post_id,
            "centrality": c.target.centrality,
            "condition": c.condition,
            "emitted": c.emitted,
        } for c in m.candidates],
    }


def manifest_from_dict(raw: dict) -> RunManifest:
    as_of = parse_timestamp(raw["as_of"])
    candidates = [TargetCandidate(
        target=InterventionTarget(target_id=c["target_id"], trigger=c["trigger"],
                                  root_post_id=c["root_post_id"],
                                  selected_at=as_of,
                                  centrality=c.get("centrality")),
        condition=c["condition"], emitted=c["emitted"])
        for c in raw.get("candidates", [])]
    return RunManifest(as_of=as_of,
                       window_start=parse_timestamp(raw["window_start"]),
                       window_end=parse_timestamp(raw["window_end"]),
                       n_network=raw["n_network"],
                       n_learner_reply=raw["n_learner_reply"],
                       n_emitted=raw["n_emitted"],
                       n_filtered_out=raw["n_filtered_out"],
                       assignment_delta=raw["assignment_delta"],
                       candidates=candidates)
