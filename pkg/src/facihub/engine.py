"""Engine facade: wires the store, targeting, generation, review, and
analysis modules over a single state directory.

All state-mutating operations accept explicit timestamps so batch runs are
reproducible; ids are minted deterministically from target/candidate ids.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__ as engine_version
from .clients import (CompletionClient, HttpCompletionClient, StubCoderClient,
                      StubReplyClient)
from .coding import CodingRejection, llm_code_records
from .config import EngineConfig
from .errors import RoleViolationError, UnparseableOutputError
from .hypergraph import build_hypergraph, export_centrality_ndjson, s_closeness
from .presence import (CodedUnit, InteractionMode, PresenceIndexVector,
                       classify_interaction_modes, index_vector_for_units,
                       learner_level_means)
from .records import EventStore, IngestReport
from .review import AcceptanceMetrics, PublicationEvent, ReviewBoard, ReviewRecord
from .roles import (CandidateResponse, GenerationParams, RoleFramework,
                    assemble_prompt, generate_candidate)
from .stats.permutation import PermutationResult, permutation_sensitivity
from .stats.reports import (GOAL1, GOAL2, BalanceTable, GoalReport,
                            balance_check, run_goal_analysis)
from .storage import NdjsonLog
from .targeting import (ConditionLedger, InterventionTarget, RunManifest,
                        manifest_from_dict, manifest_to_dict, run_daily_targeting)

log = logging.getLogger(__name__)


class Engine:
    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        data_dir = Path(self.config.storage.data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        self.data_dir = data_dir
        self.store = EventStore(data_dir / "records.ndjson")
        self.ledger = ConditionLedger(data_dir,
                                      parity_mapping=self.config.targeting.parity_mapping)
        self.board = ReviewBoard(data_dir)
        self._runs_log = NdjsonLog(data_dir / "runs.ndjson")
        self._runs: list[RunManifest] = [manifest_from_dict(raw)
                                         for raw in self._runs_log.load()]
        self._coded_log = NdjsonLog(data_dir / "coded_units.ndjson")
        self._coded: dict[str, list[CodedUnit]] = {}
        self._coding_rejected: set[str] = set()
        self._coded_empty: set[str] = set()
        for raw in self._coded_log.load():
            if raw.get("rejected"):
                self._coding_rejected.add(raw["record_id"])
            elif raw.get("empty"):
                self._coded_empty.add(raw["record_id"])
            else:
                unit = CodedUnit(record_id=raw["record_id"], indicator=raw["indicator"],
                                 salience=raw["salience"])
                self._coded.setdefault(unit.record_id, []).append(unit)
        if self.config.role_profile == "full":
            self.framework = RoleFramework.full()
        else:
            self.framework = RoleFramework.guide_amplifier()
        if self.config.llm.endpoint == "stub":
            self.reply_client: CompletionClient = StubReplyClient(self.framework.enabled)
            self.coder_client: CompletionClient = StubCoderClient()
        else:
            client = HttpCompletionClient(self.config.llm.endpoint,
                                          self.config.llm.timeout_seconds)
            self.reply_client = client
            self.coder_client = client

    # -- ingest ---------------------------------------------------------------

    def ingest_path(self, path: str | Path) -> IngestReport:
        return self.store.ingest_path(path)

    def ingest_lines(self, lines: Iterable[str]) -> IngestReport:
        return self.store.ingest_lines(lines)

    # -- targeting + generation ------------------------------------------------

    def _previous_as_of(self, as_of: datetime) -> datetime | None:
        earlier = [m.as_of for m in self._runs if m.as_of < as_of]
        return max(earlier) if earlier else None

    def run(self, as_of: datetime) -> RunManifest:
        """One processing run: targeting, candidate generation for emitted
        targets that have none yet, and enqueueing for review."""
        t = self.config.targeting
        run_result = run_daily_targeting(
            self.store, self.ledger, as_of,
            window_hours=t.window_hours, fraction=t.fraction, s=t.s,
            pca_user_id=t.pca_user_id,
            previous_as_of=self._previous_as_of(as_of))
        self._runs.append(run_result.manifest)
        self._runs_log.append(manifest_to_dict(run_result.manifest))
        fresh = [target for target in run_result.emitted
                 if not self.board.candidates_for_target(target.target_id)]
        generated = self._generate_candidates(fresh, generated_at=as_of)
        for candidate in generated:
            self.board.enqueue(candidate)
        return run_result.manifest

    def _generate_candidates(self, targets: Sequence[InterventionTarget],
                             generated_at: datetime) -> list[CandidateResponse]:
        params = GenerationParams(model_name=self.config.llm.model_name,
                                  temperature=self.config.llm.temperature)

        def build(target: InterventionTarget) -> CandidateResponse | None:
            ctx = self.store.resolve_thread(target.target_id)
            bundle = assemble_prompt(target.target_id, ctx, self.framework, params)
            seq = len(self.board.candidates_for_target(target.target_id)) + 1
            candidate_id = f"cand-{target.target_id}-{seq}"
            try:
                return generate_candidate(bundle, self.reply_client, self.framework,
                                          candidate_id, generated_at)
            except (UnparseableOutputError, RoleViolationError) as exc:
                log.warning("generation failed for %s: %s", target.target_id, exc)
                return None

        ordered = sorted(targets, key=lambda t: t.target_id)
        with ThreadPoolExecutor(max_workers=self.config.llm.parallelism) as pool:
            results = list(pool.map(build, ordered))
        return [c for c in results if c is not None]

    def regenerate(self, target_id: str, generated_at: datetime | None = None,
                   ) -> CandidateResponse:
        """Manually generate a fresh candidate for a target (each candidate
        is reviewed independently)."""
        generated_at = generated_at or datetime.now(timezone.utc)
        ctx = self.store.resolve_thread(target_id)
        params = GenerationParams(model_name=self.config.llm.model_name,
                                  temperature=self.config.llm.temperature)
        bundle = assemble_prompt(target_id, ctx, self.framework, params)
        seq = len(self.board.candidates_for_target(target_id)) + 1
        candidate = generate_candidate(bundle, self.reply_client, self.framework,
                                       f"cand-{target_id}-{seq}", generated_at)
        self.board.enqueue(candidate)
        return candidate

    # -- review + publication ---------------------------------------------------

    def decide(self, candidate_id: str, decision: str, dimension_flags: dict,
               reviewer_id: str, note: str | None = None,
               decided_at: datetime | None = None) -> ReviewRecord:
        return self.board.decide(candidate_id, decision, dimension_flags,
                                 reviewer_id, note=note, decided_at=decided_at)

    def publish(self, since: datetime | None = None,
                published_at: datetime | None = None) -> list[PublicationEvent]:
        return self.board.publish_accepted(self.store,
                                           self.config.targeting.pca_user_id,
                                           since=since, published_at=published_at)

    def metrics(self, start: datetime | None = None,
                end: datetime | None = None) -> AcceptanceMetrics:
        return self.board.acceptance_metrics(start, end)

    # -- presence coding ----------------------------------------------------------

    def _codable_records(self):
        pca = self.config.targeting.pca_user_id
        return [rec for rec in self.store
                if rec.action_type in ("commented", "replied")
                and rec.actor_id != pca and (rec.text or "").strip()]

    def ensure_coded(self) -> list[CodingRejection]:
        """Code every eligible record that has no stored coding yet."""
        done = set(self._coded) | self._coding_rejected | self._coded_empty
        todo = [rec for rec in self._codable_records() if rec.record_id not in done]
        if not todo:
            return []
        units, rejections = llm_code_records(todo, self.coder_client,
                                             self.config.llm.model_name,
                                             self.config.llm.coder_temperature)
        coded_ids = set()
        for unit in units:
            coded_ids.add(unit.record_id)
            self._coded.setdefault(unit.record_id, []).append(unit)
            self._coded_log.append({"record_id": unit.record_id,
                                    "indicator": unit.indicator,
                                    "salience": unit.salience, "coder_id": "llm"})
        for rec in todo:
            if rec.record_id not in coded_ids and not any(
                    r.record_id == rec.record_id for r in rejections):
                self._coded_empty.add(rec.record_id)
                self._coded_log.append({"record_id": rec.record_id, "empty": True})
        for rejection in rejections:
            self._coding_rejected.add(rejection.record_id)
            self._coded_log.append({"record_id": rejection.record_id, "rejected": True,
                                    "reason": rejection.reason})
        return rejections

    # -- analysis -----------------------------------------------------------------

    def _published_post_ids(self) -> set[str]:
        pca = self.config.targeting.pca_user_id
        return {rec.post_id for rec in self.store if rec.actor_id == pca}

    def presence_dataset(self):
        """(learner_id, condition, vector, timestamp, record_id) rows over
        coded comment/reply records whose root post has an assignment."""
        self.ensure_coded()
        rows = []
        for rec in self._codable_records():
            if rec.record_id in self._coding_rejected:
                continue
            assignment = self.ledger.get(rec.post_id)
            if assignment is None:
                continue
            vector = index_vector_for_units(self._coded.get(rec.record_id, []))
            rows.append((rec.actor_id, assignment.condition, vector,
                         rec.timestamp, rec.record_id))
        return rows

    def learner_condition_means(self) -> dict[tuple[str, str], PresenceIndexVector]:
        rows = self.presence_dataset()
        return learner_level_means((learner, condition, vector)
                                   for learner, condition, vector, _, _ in rows)

    def interaction_modes(self) -> list[InteractionMode]:
        return classify_interaction_modes(self.store, self._published_post_ids(),
                                          self.config.targeting.pca_user_id)

    def goal1_report(self) -> GoalReport:
        return run_goal_analysis(GOAL1, self.learner_condition_means(),
                                 alpha=self.config.stats.alpha)

    def goal2_report(self) -> GoalReport:
        modes = {m.learner_id: m.mode for m in self.interaction_modes()}
        return run_goal_analysis(GOAL2, self.learner_condition_means(), modes=modes,
                                 alpha=self.config.stats.alpha)

    def permutation_report(self, indicator: str,
                           n_permutations: int | None = None,
                           seed: int | None = None) -> PermutationResult:
        data = []
        for learner, condition, vector, ts, _ in self.presence_dataset():
            iso = ts.isocalendar()
            week = iso[0] * 100 + iso[1]
            data.append((learner, week, condition, vector[indicator]))
        return permutation_sensitivity(
            data,
            n_permutations=n_permutations or self.config.stats.permutation_n,
            seed=seed if seed is not None else self.config.stats.permutation_seed,
            indicator=indicator)

    def balance_report(self) -> BalanceTable:
        centrality: dict[str, float] = {}
        for manifest in self._runs:
            for candidate in manifest.candidates:
                target = candidate.target
                if (target.target_id == target.root_post_id
                        and target.centrality is not None
                        and target.root_post_id not in centrality):
                    centrality[target.root_post_id] = target.centrality
        posts = []
        for assignment in self.ledger.all():
            ts = self.store.artifact_created_at(assignment.post_id)
            if ts is None:
                continue
            posts.append((assignment.post_id, assignment.condition, ts,
                          centrality.get(assignment.post_id)))
        return balance_check(posts)

    def export_centrality(self, as_of: datetime, path: str | Path) -> None:
        from datetime import timedelta

        window = (as_of - timedelta(hours=self.config.targeting.window_hours), as_of)
        h = build_hypergraph(self.store.records, window)
        export_centrality_ndjson(h, s_closeness(h, s=self.config.targeting.s), path)

    @property
    def runs(self) -> list[RunManifest]:
        return list(self._runs)

    @property
    def version(self) -> str:
        return engine_version
