import json
from datetime import datetime, timezone

import pytest

from facihub.config import EngineConfig
from facihub.engine import Engine
from facihub.records import EventStore


def ts(value: str) -> datetime:
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    t = datetime.fromisoformat(value)
    return t if t.tzinfo else t.replace(tzinfo=timezone.utc)


class LogBuilder:
    """Builds coherent line-delimited logs for tests."""

    def __init__(self):
        self.lines: list[str] = []
        self._n = 0
        self._post_author: dict[str, str] = {}
        self._comment: dict[str, tuple[str, str]] = {}  # comment -> (post, author)
        self._reply: dict[str, tuple[str, str, str, str | None]] = {}

    def _emit(self, **fields) -> str:
        self._n += 1
        fields.setdefault("record_id", f"rec{self._n:04d}")
        self.lines.append(json.dumps(fields))
        return fields["record_id"]

    def post(self, post_id, author, when, text="A post title\nSome body text."):
        self._post_author[post_id] = author
        return self._emit(timestamp=when, actor_id=author, action_type="posted",
                          post_id=post_id, post_author_id=author, text=text)

    def comment(self, comment_id, post_id, author, when, text="a comment"):
        self._comment[comment_id] = (post_id, author)
        return self._emit(timestamp=when, actor_id=author, action_type="commented",
                          post_id=post_id, post_author_id=self._post_author[post_id],
                          comment_id=comment_id, comment_author_id=author, text=text)

    def reply(self, reply_id, comment_id, author, when, text="a reply",
              parent_reply_id=None):
        post_id, comment_author = self._comment[comment_id]
        self._reply[reply_id] = (post_id, comment_id, author, parent_reply_id)
        fields = dict(timestamp=when, actor_id=author, action_type="replied",
                      post_id=post_id, post_author_id=self._post_author[post_id],
                      comment_id=comment_id, comment_author_id=comment_author,
                      reply_id=reply_id, reply_author_id=author, text=text)
        if parent_reply_id is not None:
            fields["parent_reply_id"] = parent_reply_id
        return self._emit(**fields)

    def like_comment(self, comment_id, actor, when):
        post_id, comment_author = self._comment[comment_id]
        return self._emit(timestamp=when, actor_id=actor, action_type="liked_comment",
                          post_id=post_id, post_author_id=self._post_author[post_id],
                          comment_id=comment_id, comment_author_id=comment_author)

    def like_reply(self, reply_id, actor, when):
        post_id, comment_id, reply_author, _ = self._reply[reply_id]
        _, comment_author = self._comment[comment_id]
        return self._emit(timestamp=when, actor_id=actor, action_type="liked_reply",
                          post_id=post_id, post_author_id=self._post_author[post_id],
                          comment_id=comment_id, comment_author_id=comment_author,
                          reply_id=reply_id, reply_author_id=reply_author)

    def store(self) -> EventStore:
        s = EventStore()
        report = s.ingest_lines(self.lines)
        assert not report.rejected, report.rejected
        return s


@pytest.fixture
def builder():
    return LogBuilder()


@pytest.fixture
def engine_factory(tmp_path):
    def make(subdir="state", **overrides) -> Engine:
        defaults = dict(storage={"data_dir": str(tmp_path / subdir)})
        defaults.update(overrides)
        return Engine(EngineConfig(**defaults))

    return make
