"""Forum activity data model: behavioral log records, validated ingestion,
thread resolution, and append-only persistence.

The store consumes line-delimited JSON logs exported by a forum platform
(one record per line, UTF-8, snake_case field names, ISO-8601 timestamps)
and keeps records in accepted-arrival order. Likes reference existing
artifacts; a like on an unknown comment/reply is rejected as dangling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from filelock import FileLock

from .errors import IntegrityError, NotFoundError

ACTION_TYPES = ("posted", "commented", "replied", "liked_comment", "liked_reply")

# Field-presence rules per action type.
_NEEDS_COMMENT = {"commented", "replied", "liked_comment", "liked_reply"}
_NEEDS_REPLY = {"replied", "liked_reply"}
_NEEDS_TEXT = {"posted", "commented", "replied"}


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp and normalize it to UTC (second resolution)."""
    if not isinstance(value, str):
        raise ValueError("timestamp must be a string")
    raw = value.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class ActionRecord:
    """One behavioral log event: who did what to which artifact."""

    record_id: str
    timestamp: datetime
    actor_id: str
    action_type: str
    post_id: str
    post_author_id: str
    comment_id: str | None = None
    comment_author_id: str | None = None
    reply_id: str | None = None
    reply_author_id: str | None = None
    text: str | None = None
    parent_reply_id: str | None = None

    def to_json_dict(self) -> dict:
        out = {
            "record_id": self.record_id,
            "timestamp": format_timestamp(self.timestamp),
            "actor_id": self.actor_id,
            "action_type": self.action_type,
            "post_id": self.post_id,
            "post_author_id": self.post_author_id,
        }
        for name in ("comment_id", "comment_author_id", "reply_id",
                     "reply_author_id", "text", "parent_reply_id"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    def to_json_line(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, sort_keys=True)


def _validate_fields(raw: dict) -> str | None:
    """Return a rejection reason for a raw record dict, or None if valid."""
    for name in ("record_id", "actor_id", "post_id", "post_author_id"):
        if not isinstance(raw.get(name), str) or not raw[name]:
            return f"missing or empty field {name!r}"
    action = raw.get("action_type")
    if action not in ACTION_TYPES:
        return f"unknown action_type {action!r}"
    try:
        parse_timestamp(raw.get("timestamp"))
    except (ValueError, TypeError):
        return "unparsable timestamp"

    has_comment = raw.get("comment_id") is not None and raw.get("comment_author_id") is not None
    any_comment = raw.get("comment_id") is not None or raw.get("comment_author_id") is not None
    if action in _NEEDS_COMMENT and not has_comment:
        return "missing comment fields"
    if action not in _NEEDS_COMMENT and any_comment:
        return "unexpected comment fields"

    has_reply = raw.get("reply_id") is not None and raw.get("reply_author_id") is not None
    any_reply = raw.get("reply_id") is not None or raw.get("reply_author_id") is not None
    if action in _NEEDS_REPLY and not has_reply:
        return "missing reply fields"
    if action not in _NEEDS_REPLY and any_reply:
        return "unexpected reply fields"

    has_text = raw.get("text") is not None
    if action in _NEEDS_TEXT and not has_text:
        return "missing text"
    if action not in _NEEDS_TEXT and has_text:
        return "likes carry no text"

    if raw.get("parent_reply_id") is not None and action not in _NEEDS_REPLY:
        return "parent_reply_id only valid on reply actions"
    return None


def record_from_dict(raw: dict) -> ActionRecord:
    """Build an ActionRecord from a validated raw dict."""
    return ActionRecord(
        record_id=raw["record_id"],
        timestamp=parse_timestamp(raw["timestamp"]),
        actor_id=raw["actor_id"],
        action_type=raw["action_type"],
        post_id=raw["post_id"],
        post_author_id=raw["post_author_id"],
        comment_id=raw.get("comment_id"),
        comment_author_id=raw.get("comment_author_id"),
        reply_id=raw.get("reply_id"),
        reply_author_id=raw.get("reply_author_id"),
        text=raw.get("text"),
        parent_reply_id=raw.get("parent_reply_id"),
    )


@dataclass(frozen=True)
class IngestReport:
    accepted: int
    duplicates_dropped: int
    rejected: list[tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.accepted + self.duplicates_dropped + len(self.rejected)


@dataclass(frozen=True)
class PostInfo:
    post_id: str
    title: str
    content: str
    author_id: str


@dataclass(frozen=True)
class ChainEntry:
    id: str
    author_id: str
    text: str


@dataclass(frozen=True)
class ThreadContext:
    """A post plus the ancestor chain leading to a target artifact."""

    post: PostInfo
    comment_chain: list[ChainEntry]
    target_kind: str  # post | comment | reply

    @property
    def target_id(self) -> str:
        return self.comment_chain[-1].id if self.comment_chain else self.post.post_id


def split_title(text: str) -> tuple[str, str]:
    """Treat the first line of a posted text as the title, the rest as content."""
    head, _, rest = text.partition("\n")
    return head.strip(), rest.strip()


class EventStore:
    """Append-only record store with stable iteration order.

    Single-writer: when file-backed, appends take an exclusive file lock;
    readers always see a consistent snapshot (lists are append-only and
    reads copy the slice they need).
    """

    def __init__(self, path: str | Path | None = None):
        self._records: list[ActionRecord] = []
        self._by_id: dict[str, ActionRecord] = {}
        # Creation indexes: artifact id -> creating record.
        self._posts: dict[str, ActionRecord] = {}
        self._comments: dict[str, ActionRecord] = {}
        self._replies: dict[str, ActionRecord] = {}
        self._path = Path(path) if path is not None else None
        self._lock = FileLock(str(self._path) + ".lock") if self._path else None
        if self._path and self._path.exists():
            with self._path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._admit(record_from_dict(json.loads(line)))

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ActionRecord]:
        return iter(list(self._records))

    def get(self, record_id: str) -> ActionRecord | None:
        return self._by_id.get(record_id)

    @property
    def records(self) -> list[ActionRecord]:
        return list(self._records)

    def records_between(self, start: datetime, end: datetime) -> list[ActionRecord]:
        """Records with start <= timestamp < end, in store order."""
        return [r for r in self._records if start <= r.timestamp < end]

    def _admit(self, rec: ActionRecord) -> None:
        self._records.append(rec)
        self._by_id[rec.record_id] = rec
        if rec.action_type == "posted":
            self._posts.setdefault(rec.post_id, rec)
        elif rec.action_type == "commented":
            self._comments.setdefault(rec.comment_id, rec)
        elif rec.action_type == "replied":
            self._replies.setdefault(rec.reply_id, rec)

    def _check_dangling(self, raw: dict) -> str | None:
        action = raw["action_type"]
        if action == "liked_comment" and raw["comment_id"] not in self._comments:
            return f"like references unknown comment {raw['comment_id']!r}"
        if action == "liked_reply" and raw["reply_id"] not in self._replies:
            return f"like references unknown reply {raw['reply_id']!r}"
        return None

    def ingest_lines(self, source: Iterable[str]) -> IngestReport:
        """Ingest serialized records; valid novel records are appended in
        arrival order, duplicates dropped, malformed lines reported."""
        accepted: list[ActionRecord] = []
        duplicates = 0
        rejected: list[tuple[int, str]] = []
        batch_ids: set[str] = set()
        for lineno, line in enumerate(source, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                rejected.append((lineno, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(raw, dict):
                rejected.append((lineno, "record is not an object"))
                continue
            reason = _validate_fields(raw)
            if reason is not None:
                rejected.append((lineno, reason))
                continue
            rid = raw["record_id"]
            if rid in self._by_id or rid in batch_ids:
                duplicates += 1
                continue
            reason = self._check_dangling(raw)
            if reason is not None:
                rejected.append((lineno, reason))
                continue
            rec = record_from_dict(raw)
            batch_ids.add(rid)
            accepted.append(rec)
            self._admit(rec)
        if accepted:
            self._persist(accepted)
        return IngestReport(accepted=len(accepted), duplicates_dropped=duplicates,
                            rejected=rejected)

    def ingest_path(self, path: str | Path) -> IngestReport:
        with Path(path).open(encoding="utf-8") as fh:
            return self.ingest_lines(fh)

    def append_record(self, rec: ActionRecord) -> None:
        """Append a single engine-minted record (e.g. a published reply)."""
        if rec.record_id in self._by_id:
            return
        self._admit(rec)
        self._persist([rec])

    def _persist(self, recs: list[ActionRecord]) -> None:
        if self._path is None:
            return
        with self._lock:
            with self._path.open("a", encoding="utf-8") as fh:
                for rec in recs:
                    fh.write(rec.to_json_line() + "\n")

    # -- thread resolution ------------------------------------------------

    def _post_info(self, post_id: str) -> PostInfo:
        rec = self._posts.get(post_id)
        if rec is None:
            raise IntegrityError(f"post {post_id!r} is not in the store",
                                 missing_id=post_id)
        title, content = split_title(rec.text or "")
        return PostInfo(post_id=post_id, title=title, content=content,
                        author_id=rec.post_author_id)

    def resolve_thread(self, target_id: str) -> ThreadContext:
        """Resolve a post/comment/reply id to its full ancestor chain."""
        if target_id in self._posts:
            return ThreadContext(post=self._post_info(target_id),
                                 comment_chain=[], target_kind="post")
        if target_id in self._comments:
            rec = self._comments[target_id]
            post = self._post_info(rec.post_id)
            entry = ChainEntry(id=target_id, author_id=rec.comment_author_id,
                               text=rec.text or "")
            return ThreadContext(post=post, comment_chain=[entry],
                                 target_kind="comment")
        if target_id in self._replies:
            chain: list[ChainEntry] = []
            seen: set[str] = set()
            cursor: ActionRecord | None = self._replies[target_id]
            post_id = cursor.post_id
            comment_id = cursor.comment_id
            while cursor is not None:
                if cursor.reply_id in seen:
                    raise IntegrityError(f"reply cycle at {cursor.reply_id!r}")
                seen.add(cursor.reply_id)
                chain.append(ChainEntry(id=cursor.reply_id,
                                        author_id=cursor.reply_author_id,
                                        text=cursor.text or ""))
                parent = cursor.parent_reply_id
                if parent is None:
                    cursor = None
                else:
                    nxt = self._replies.get(parent)
                    if nxt is None:
                        raise IntegrityError(
                            f"reply {chain[-1].id!r} references unknown parent reply {parent!r}",
                            missing_id=parent)
                    cursor = nxt
            comment = self._comments.get(comment_id)
            if comment is None:
                raise IntegrityError(
                    f"reply {target_id!r} references unknown comment {comment_id!r}",
                    missing_id=comment_id)
            chain.append(ChainEntry(id=comment_id, author_id=comment.comment_author_id,
                                    text=comment.text or ""))
            chain.reverse()
            return ThreadContext(post=self._post_info(post_id), comment_chain=chain,
                                 target_kind="reply")
        raise NotFoundError(f"no post, comment, or reply with id {target_id!r}")

    def artifact_author(self, artifact_id: str) -> str | None:
        """Author of a post/comment/reply artifact, or None if unknown."""
        if artifact_id in self._posts:
            return self._posts[artifact_id].post_author_id
        if artifact_id in self._comments:
            return self._comments[artifact_id].comment_author_id
        if artifact_id in self._replies:
            return self._replies[artifact_id].reply_author_id
        return None

    def artifact_created_at(self, artifact_id: str) -> datetime | None:
        for index in (self._posts, self._comments, self._replies):
            rec = index.get(artifact_id)
            if rec is not None:
                return rec.timestamp
        return None

    def post_ids(self) -> list[str]:
        return list(self._posts)

    def has_post(self, post_id: str) -> bool:
        return post_id in self._posts

    def reply_parent_author(self, rec: ActionRecord) -> str | None:
        """Author of the artifact a replied-record answers (parent reply if
        chained, else the top-level comment)."""
        if rec.action_type != "replied":
            return None
        parent = rec.parent_reply_id
        if parent is not None:
            return self.artifact_author(parent)
        return self.artifact_author(rec.comment_id)
