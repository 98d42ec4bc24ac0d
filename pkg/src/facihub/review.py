"""Human review of candidate replies: FIFO moderation queue, three-dimension
accept/reject decisions, publication gating, and acceptance metrics.

Decisions are immutable and first-decision-wins. Only accepted candidates
ever publish; publication appends a synthetic activity record authored by
the agent, making its contributions first-class thread members for
subsequent targeting and analysis.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import ConflictError, NotFoundError
from .records import ActionRecord, EventStore, format_timestamp, parse_timestamp
from .roles import CandidateResponse
from .storage import NdjsonLog

REVIEW_DIMENSIONS = ("role_task_alignment", "interactional_appropriateness",
                     "factual_plausibility")


@dataclass(frozen=True)
class ReviewRecord:
    candidate_id: str
    decision: str  # accept | reject
    dimension_flags: dict[str, str]  # dimension -> pass | fail
    reviewer_id: str
    decided_at: datetime
    note: str | None = None
    framework_version: str = "v2"


@dataclass(frozen=True)
class PublicationEvent:
    candidate_id: str
    target_id: str
    published_at: datetime


@dataclass(frozen=True)
class DailyAcceptance:
    date: str  # ISO date of candidate generation
    generated: int
    accepted: int
    rejected: int
    acceptance_rate: float | None  # None when nothing was decided that day
    role_composition: dict[str, float]


@dataclass(frozen=True)
class AcceptanceMetrics:
    rows: list[DailyAcceptance]

    @property
    def total_generated(self) -> int:
        return sum(r.generated for r in self.rows)

    @property
    def total_accepted(self) -> int:
        return sum(r.accepted for r in self.rows)

    @property
    def total_rejected(self) -> int:
        return sum(r.rejected for r in self.rows)

    @property
    def overall_rate(self) -> float | None:
        decided = self.total_accepted + self.total_rejected
        return self.total_accepted / decided if decided else None

    def overall_role_composition(self) -> dict[str, float]:
        counts: dict[str, int] = {}
        for row in self.rows:
            for role, ratio in row.role_composition.items():
                counts[role] = counts.get(role, 0) + round(ratio * row.generated)
        total = sum(counts.values())
        return {role: c / total for role, c in sorted(counts.items())} if total else {}

    def to_tsv(self) -> str:
        roles = sorted({role for row in self.rows for role in row.role_composition})
        header = ["date", "generated", "accepted", "rejected", "acceptance_rate"]
        header += [f"share_{role}" for role in roles]
        lines = ["\t".join(header)]
        for row in self.rows:
            rate = "NA" if row.acceptance_rate is None else f"{row.acceptance_rate:.6g}"
            cells = [row.date, str(row.generated), str(row.accepted),
                     str(row.rejected), rate]
            cells += [f"{row.role_composition.get(role, 0.0):.6g}" for role in roles]
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"


def _validate_flags(flags: dict) -> dict[str, str]:
    if set(flags) != set(REVIEW_DIMENSIONS):
        raise ValueError(f"dimension_flags must cover exactly {REVIEW_DIMENSIONS}, "
                         f"got {sorted(flags)}")
    for dim, value in flags.items():
        if value not in ("pass", "fail"):
            raise ValueError(f"flag for {dim} must be 'pass' or 'fail', got {value!r}")
    return dict(flags)


class ReviewBoard:
    """Moderation queue plus decision and publication ledgers.

    State is reconstructed from append-only logs: a candidate is pending
    unless a review exists for it. `decide` is linearizable per candidate
    (a lock guards the compare-and-set on status).
    """

    def __init__(self, directory: str | Path | None = None):
        base = Path(directory) if directory is not None else None
        self._candidate_log = NdjsonLog(base / "candidates.ndjson" if base else None)
        self._review_log = NdjsonLog(base / "reviews.ndjson" if base else None)
        self._publication_log = NdjsonLog(base / "publications.ndjson" if base else None)
        self._mutex = threading.Lock()
        self._candidates: dict[str, CandidateResponse] = {}
        self._queue: list[str] = []
        self._reviews: dict[str, ReviewRecord] = {}
        self._publications: dict[str, PublicationEvent] = {}
        for raw in self._candidate_log.load():
            c = _candidate_from_dict(raw)
            self._candidates[c.candidate_id] = c
            self._queue.append(c.candidate_id)
        for raw in self._review_log.load():
            r = _review_from_dict(raw)
            self._reviews[r.candidate_id] = r
            c = self._candidates.get(r.candidate_id)
            if c is not None:
                status = "accepted" if r.decision == "accept" else "rejected"
                self._candidates[r.candidate_id] = replace(c, status=status)
        for raw in self._publication_log.load():
            e = PublicationEvent(candidate_id=raw["candidate_id"],
                                 target_id=raw["target_id"],
                                 published_at=parse_timestamp(raw["published_at"]))
            self._publications[e.candidate_id] = e

    # -- queue -----------------------------------------------------------

    def enqueue(self, candidate: CandidateResponse) -> int:
        if candidate.status != "pending":
            raise ValueError(f"only pending candidates can be enqueued "
                             f"(status {candidate.status!r})")
        with self._mutex:
            if candidate.candidate_id in self._candidates:
                raise ConflictError(f"candidate {candidate.candidate_id!r} "
                                    "is already enqueued")
            self._candidates[candidate.candidate_id] = candidate
            self._queue.append(candidate.candidate_id)
            position = sum(1 for cid in self._queue
                           if self._candidates[cid].status == "pending")
        self._candidate_log.append(_candidate_to_dict(candidate))
        return position

    def pending(self) -> list[CandidateResponse]:
        return [self._candidates[cid] for cid in self._queue
                if self._candidates[cid].status == "pending"]

    def get_candidate(self, candidate_id: str) -> CandidateResponse:
        c = self._candidates.get(candidate_id)
        if c is None:
            raise NotFoundError(f"unknown candidate {candidate_id!r}")
        return c

    def candidates(self) -> list[CandidateResponse]:
        return [self._candidates[cid] for cid in self._queue]

    def candidates_for_target(self, target_id: str) -> list[CandidateResponse]:
        return [c for c in self.candidates() if c.target_id == target_id]

    def stale_pending(self, horizon: timedelta,
                      now: datetime | None = None) -> list[CandidateResponse]:
        """Pending candidates older than the staleness horizon (flag only,
        never auto-decided)."""
        now = now or datetime.now(timezone.utc)
        return [c for c in self.pending() if now - c.generated_at > horizon]

    # -- decisions ---------------------------------------------------------

    def get_review(self, candidate_id: str) -> ReviewRecord | None:
        return self._reviews.get(candidate_id)

    def decide(self, candidate_id: str, decision: str, dimension_flags: dict,
               reviewer_id: str, note: str | None = None,
               decided_at: datetime | None = None,
               framework_version: str = "v2") -> ReviewRecord:
        if decision not in ("accept", "reject"):
            raise ValueError(f"decision must be 'accept' or 'reject', got {decision!r}")
        flags = _validate_flags(dimension_flags)
        failing = [d for d, v in flags.items() if v == "fail"]
        if decision == "accept" and failing:
            raise ValueError(f"accept requires all dimensions to pass; "
                             f"failing: {sorted(failing)}")
        if decision == "reject" and not failing:
            raise ValueError("reject requires at least one failing dimension")
        with self._mutex:
            candidate = self.get_candidate(candidate_id)
            existing = self._reviews.get(candidate_id)
            if existing is not None:
                raise ConflictError(f"candidate {candidate_id!r} was already decided",
                                    existing=existing)
            record = ReviewRecord(candidate_id=candidate_id, decision=decision,
                                  dimension_flags=flags, reviewer_id=reviewer_id,
                                  decided_at=decided_at or datetime.now(timezone.utc),
                                  note=note, framework_version=framework_version)
            self._reviews[candidate_id] = record
            status = "accepted" if decision == "accept" else "rejected"
            self._candidates[candidate_id] = replace(candidate, status=status)
        self._review_log.append(_review_to_dict(record))
        return record

    # -- publication --------------------------------------------------------

    def publish_accepted(self, store: EventStore, pca_user_id: str,
                         since: datetime | None = None,
                         published_at: datetime | None = None) -> list[PublicationEvent]:
        """Publish every accepted-but-unpublished candidate (decided at or
        after `since` when given) as a synthetic activity record."""
        published_at = published_at or datetime.now(timezone.utc)
        due = []
        for cid, review in self._reviews.items():
            if review.decision != "accept" or cid in self._publications:
                continue
            if since is not None and review.decided_at < since:
                continue
            due.append((review.decided_at, cid))
        events = []
        for _, cid in sorted(due, key=lambda pair: (pair[0], pair[1])):
            candidate = self._candidates[cid]
            record = _synthetic_record(store, candidate, pca_user_id, published_at)
            store.append_record(record)
            event = PublicationEvent(candidate_id=cid,
                                     target_id=candidate.target_id,
                                     published_at=published_at)
            self._publications[cid] = event
            self._publication_log.append({
                "candidate_id": cid, "target_id": candidate.target_id,
                "published_at": format_timestamp(published_at)})
            events.append(event)
        return events

    def publications(self) -> list[PublicationEvent]:
        return list(self._publications.values())

    def published_candidate_ids(self) -> set[str]:
        return set(self._publications)

    # -- metrics --------------------------------------------------------------

    def acceptance_metrics(self, start: datetime | None = None,
                           end: datetime | None = None) -> AcceptanceMetrics:
        """Daily generation/decision counts and role mix, keyed by the day
        each candidate was generated."""
        days: dict[str, dict] = {}
        for cid in self._queue:
            candidate = self._candidates[cid]
            if start is not None and candidate.generated_at < start:
                continue
            if end is not None and candidate.generated_at >= end:
                continue
            day = candidate.generated_at.date().isoformat()
            bucket = days.setdefault(day, {"generated": 0, "accepted": 0,
                                           "rejected": 0, "roles": {}})
            bucket["generated"] += 1
            bucket["roles"][candidate.role] = bucket["roles"].get(candidate.role, 0) + 1
            if candidate.status == "accepted":
                bucket["accepted"] += 1
            elif candidate.status == "rejected":
                bucket["rejected"] += 1
        rows = []
        for day in sorted(days):
            bucket = days[day]
            decided = bucket["accepted"] + bucket["rejected"]
            rate = bucket["accepted"] / decided if decided else None
            composition = {role: count / bucket["generated"]
                           for role, count in sorted(bucket["roles"].items())}
            rows.append(DailyAcceptance(date=day, generated=bucket["generated"],
                                        accepted=bucket["accepted"],
                                        rejected=bucket["rejected"],
                                        acceptance_rate=rate,
                                        role_composition=composition))
        return AcceptanceMetrics(rows=rows)


def _synthetic_record(store: EventStore, candidate: CandidateResponse,
                      pca_user_id: str, published_at: datetime) -> ActionRecord:
    ctx = store.resolve_thread(candidate.target_id)
    base = dict(record_id=f"pub-{candidate.candidate_id}",
                timestamp=published_at,
                actor_id=pca_user_id,
                post_id=ctx.post.post_id,
                post_author_id=ctx.post.author_id,
                text=candidate.text)
    if ctx.target_kind == "post":
        return ActionRecord(action_type="commented",
                            comment_id=f"pca-c-{candidate.candidate_id}",
                            comment_author_id=pca_user_id, **base)
    top_comment = ctx.comment_chain[0]
    parent_reply = candidate.target_id if ctx.target_kind == "reply" else None
    return ActionRecord(action_type="replied",
                        comment_id=top_comment.id,
                        comment_author_id=top_comment.author_id,
                        reply_id=f"pca-r-{candidate.candidate_id}",
                        reply_author_id=pca_user_id,
                        parent_reply_id=parent_reply, **base)


def _candidate_to_dict(c: CandidateResponse) -> dict:
    return {"candidate_id": c.candidate_id, "target_id": c.target_id,
            "role": c.role, "text": c.text,
            "generated_at": format_timestamp(c.generated_at),
            "raw_output": c.raw_output}


def _candidate_from_dict(raw: dict) -> CandidateResponse:
    return CandidateResponse(candidate_id=raw["candidate_id"],
                             target_id=raw["target_id"], role=raw["role"],
                             text=raw["text"],
                             generated_at=parse_timestamp(raw["generated_at"]),
                             raw_output=raw["raw_output"])


def _review_to_dict(r: ReviewRecord) -> dict:
    return {"candidate_id": r.candidate_id, "decision": r.decision,
            "dimension_flags": r.dimension_flags, "reviewer_id": r.reviewer_id,
            "decided_at": format_timestamp(r.decided_at), "note": r.note,
            "framework_version": r.framework_version}


def _review_from_dict(raw: dict) -> ReviewRecord:
    return ReviewRecord(candidate_id=raw["candidate_id"], decision=raw["decision"],
                        dimension_flags=dict(raw["dimension_flags"]),
                        reviewer_id=raw["reviewer_id"],
                        decided_at=parse_timestamp(raw["decided_at"]),
                        note=raw.get("note"),
                        framework_version=raw.get("framework_version", "v2"))
