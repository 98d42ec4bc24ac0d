"""Walkthrough: the full daily cycle — targeting, role-conditioned
generation, human review, and gated publication.

Nothing the model writes reaches the store without an accept decision
against the three-dimension checklist (role/task alignment, interactional
appropriateness, factual plausibility). Published replies become ordinary
records, so the agent is a first-class thread member afterwards.
"""

import tempfile
from datetime import timedelta
from pathlib import Path

from facihub.config import EngineConfig
from facihub.engine import Engine
from facihub.records import parse_timestamp

FIXTURE = Path(__file__).resolve().parents[1] / "src/facihub/fixtures/sample_log.ndjson"

with tempfile.TemporaryDirectory() as workdir:
    config = EngineConfig(storage={"data_dir": workdir},
                          targeting={"fraction": 0.4})  # generous for the tiny demo log
    engine = Engine(config)  # llm.endpoint defaults to "stub": offline, deterministic
    engine.ingest_path(FIXTURE)

    as_of = parse_timestamp("2025-12-03T00:00:00Z")
    manifest = engine.run(as_of)
    print(f"run at {as_of:%F}: {manifest.n_network} network targets, "
          f"{manifest.n_learner_reply} learner-reply targets, "
          f"{manifest.n_emitted} emitted ({manifest.n_filtered_out} filtered to "
          "the without-condition)")

    print("\nmoderation queue:")
    for candidate in engine.board.pending():
        print(f"  {candidate.candidate_id} role={candidate.role}")
        print(f"    {candidate.text[:90]}...")

    # A facilitator accepts the first candidate and rejects the second.
    pending = engine.board.pending()
    ok = {"role_task_alignment": "pass", "interactional_appropriateness": "pass",
          "factual_plausibility": "pass"}
    engine.decide(pending[0].candidate_id, "accept", ok, "facilitator-1",
                  decided_at=as_of + timedelta(hours=1))
    if len(pending) > 1:
        engine.decide(pending[1].candidate_id, "reject",
                      dict(ok, factual_plausibility="fail"), "facilitator-1",
                      note="reads like a fabricated anecdote",
                      decided_at=as_of + timedelta(hours=1))

    events = engine.publish(published_at=as_of + timedelta(hours=2))
    print(f"\npublished {len(events)} replies")
    for event in events:
        rec = engine.store.get(f"pub-{event.candidate_id}")
        print(f"  -> {rec.action_type} in thread {rec.post_id}")

    metrics = engine.metrics()
    print("\nacceptance metrics:")
    print(metrics.to_tsv())
