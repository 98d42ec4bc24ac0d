"""Walkthrough: ingesting a behavioral log and resolving discussion threads.

The engine consumes line-delimited JSON exported by a forum platform. Each
line is one action (posted / commented / replied / liked_comment /
liked_reply). Ingestion validates per record, drops duplicates, and keeps
arrival order, so replaying a log is idempotent.
"""

from pathlib import Path

from facihub.records import EventStore

FIXTURE = Path(__file__).resolve().parents[1] / "src/facihub/fixtures/sample_log.ndjson"

store = EventStore()  # in-memory; pass a path for an append-only file store
report = store.ingest_path(FIXTURE)
print(f"accepted={report.accepted} duplicates={report.duplicates_dropped} "
      f"rejected={len(report.rejected)}")

# Replaying the same file adds nothing: every record id is already known.
replay = store.ingest_path(FIXTURE)
print(f"replay: accepted={replay.accepted} duplicates={replay.duplicates_dropped}")

# Malformed records are reported line by line, never aborting the batch.
bad = store.ingest_lines([
    '{"record_id": "bad1", "timestamp": "whenever", "actor_id": "u1",'
    ' "action_type": "posted", "post_id": "px", "post_author_id": "u1", "text": "t"}',
])
print("rejections:", bad.rejected)

# Thread resolution walks a target's ancestor chain back to its post.
ctx = store.resolve_thread("r002")
print(f"\ntarget kind: {ctx.target_kind}")
print(f"post: {ctx.post.post_id!r} titled {ctx.post.title!r}")
for entry in ctx.comment_chain:
    print(f"  {entry.id} by {entry.author_id}: {entry.text[:60]}")
