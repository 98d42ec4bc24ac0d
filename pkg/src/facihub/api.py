"""HTTP shell over the engine. Every state-mutating endpoint maps 1:1 to
one engine operation; responses are structured JSON, errors carry
(code, message, field errors) bodies, never HTML."""

from __future__ import annotations

from datetime import datetime, timezone

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException
from pydantic import BaseModel, Field

from .engine import Engine
from .errors import (AnalysisError, ConflictError, EngineError, NotFoundError)
from .records import ThreadContext, format_timestamp, parse_timestamp
from .review import REVIEW_DIMENSIONS
from .roles import CandidateResponse


class DecisionPayload(BaseModel):
    decision: str
    dimension_flags: dict[str, str]
    reviewer_id: str
    note: str | None = None
    decided_at: str | None = None


class RunPayload(BaseModel):
    as_of: str


class PublishPayload(BaseModel):
    since: str | None = None
    published_at: str | None = None


class PermutationQuery(BaseModel):
    indicator: str = "SP_total"
    n_permutations: int | None = Field(default=None, ge=1)
    seed: int | None = None


def _candidate_json(c: CandidateResponse, ctx: ThreadContext | None = None) -> dict:
    out = {"candidate_id": c.candidate_id, "target_id": c.target_id,
           "role": c.role, "text": c.text,
           "generated_at": format_timestamp(c.generated_at),
           "status": c.status, "raw_output": c.raw_output}
    if ctx is not None:
        out["thread"] = {
            "post": {"post_id": ctx.post.post_id, "title": ctx.post.title,
                     "content": ctx.post.content, "author_id": ctx.post.author_id},
            "chain": [{"id": e.id, "author_id": e.author_id, "text": e.text}
                      for e in ctx.comment_chain],
            "target_kind": ctx.target_kind,
        }
    return out


def _parse_instant(value: str | None, field: str) -> datetime | None:
    if value is None:
        return None
    try:
        return parse_timestamp(value)
    except ValueError:
        raise HTTPException(status_code=422, detail={
            "code": "invalid_timestamp",
            "message": f"{field} is not an ISO-8601 instant",
            "field_errors": {field: "invalid timestamp"}})


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="facihub", version=engine.version)

    def check_token(authorization: str | None = Header(default=None)):
        token = engine.config.api_token
        if token is None:
            return
        if authorization != f"Bearer {token}":
            raise HTTPException(status_code=401, detail={
                "code": "unauthorized", "message": "missing or invalid API token"})

    guarded = Depends(check_token)

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        detail = exc.detail
        if isinstance(detail, dict):
            body = detail
        else:
            code = "not_found" if exc.status_code == 404 else "http_error"
            body = {"code": code, "message": str(detail), "path": request.url.path}
        return JSONResponse(status_code=exc.status_code, content={"error": body})

    @app.exception_handler(RequestValidationError)
    async def invalid(request: Request, exc: RequestValidationError):
        field_errors = {}
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"] if p != "body")
            field_errors[loc] = err["msg"]
        return JSONResponse(status_code=422, content={
            "error": {"code": "validation_error", "message": "invalid payload",
                      "field_errors": field_errors}})

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError):
        if isinstance(exc, NotFoundError):
            status, code = 404, "not_found"
        elif isinstance(exc, ConflictError):
            status, code = 409, "conflict"
        elif isinstance(exc, AnalysisError):
            status, code = 422, "analysis_error"
        else:
            status, code = 422, "engine_error"
        body = {"code": code, "message": str(exc)}
        existing = getattr(exc, "existing", None)
        if existing is not None:
            body["existing"] = {
                "candidate_id": existing.candidate_id,
                "decision": existing.decision,
                "reviewer_id": existing.reviewer_id,
                "decided_at": format_timestamp(existing.decided_at),
                "dimension_flags": existing.dimension_flags,
            }
        return JSONResponse(status_code=status, content={"error": body})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={
            "error": {"code": "validation_error", "message": str(exc)}})

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "version": engine.version}

    @app.post("/api/ingest", dependencies=[guarded])
    async def ingest(request: Request):
        body = await request.body()
        report = engine.ingest_lines(body.decode("utf-8").splitlines())
        return {"accepted": report.accepted,
                "duplicates_dropped": report.duplicates_dropped,
                "rejected": [{"line": line, "reason": reason}
                             for line, reason in report.rejected]}

    @app.post("/api/runs", dependencies=[guarded])
    async def runs(payload: RunPayload):
        as_of = _parse_instant(payload.as_of, "as_of")
        manifest = engine.run(as_of)
        return {
            "as_of": format_timestamp(manifest.as_of),
            "window": [format_timestamp(manifest.window_start),
                       format_timestamp(manifest.window_end)],
            "n_network": manifest.n_network,
            "n_learner_reply": manifest.n_learner_reply,
            "n_emitted": manifest.n_emitted,
            "n_filtered_out": manifest.n_filtered_out,
            "assignment_delta": manifest.assignment_delta,
        }

    @app.get("/api/queue", dependencies=[guarded])
    async def queue():
        out = []
        for candidate in engine.board.pending():
            ctx = engine.store.resolve_thread(candidate.target_id)
            out.append(_candidate_json(candidate, ctx))
        return {"pending": out}

    @app.get("/api/candidates/{candidate_id}", dependencies=[guarded])
    async def candidate(candidate_id: str):
        c = engine.board.get_candidate(candidate_id)
        ctx = engine.store.resolve_thread(c.target_id)
        payload = _candidate_json(c, ctx)
        review = engine.board.get_review(candidate_id)
        if review is not None:
            payload["review"] = {
                "decision": review.decision,
                "dimension_flags": review.dimension_flags,
                "reviewer_id": review.reviewer_id,
                "decided_at": format_timestamp(review.decided_at),
                "note": review.note,
            }
        return payload

    @app.post("/api/candidates/{candidate_id}/decision", dependencies=[guarded])
    async def decision(candidate_id: str, payload: DecisionPayload):
        if set(payload.dimension_flags) != set(REVIEW_DIMENSIONS):
            raise HTTPException(status_code=422, detail={
                "code": "validation_error",
                "message": f"dimension_flags must cover {REVIEW_DIMENSIONS}",
                "field_errors": {"dimension_flags": "incomplete checklist"}})
        record = engine.decide(candidate_id, payload.decision, payload.dimension_flags,
                               payload.reviewer_id, note=payload.note,
                               decided_at=_parse_instant(payload.decided_at, "decided_at"))
        return {"candidate_id": record.candidate_id, "decision": record.decision,
                "decided_at": format_timestamp(record.decided_at),
                "dimension_flags": record.dimension_flags,
                "reviewer_id": record.reviewer_id, "note": record.note}

    @app.post("/api/publish", dependencies=[guarded])
    async def publish(payload: PublishPayload | None = None):
        payload = payload or PublishPayload()
        events = engine.publish(since=_parse_instant(payload.since, "since"),
                                published_at=_parse_instant(payload.published_at,
                                                            "published_at"))
        return {"published": [{"candidate_id": e.candidate_id,
                               "target_id": e.target_id,
                               "published_at": format_timestamp(e.published_at)}
                              for e in events]}

    @app.get("/api/metrics/acceptance", dependencies=[guarded])
    async def metrics(from_: str | None = Query(default=None, alias="from"),
                      to: str | None = None):
        m = engine.metrics(_parse_instant(from_, "from"), _parse_instant(to, "to"))
        return {"rows": [{"date": r.date, "generated": r.generated,
                          "accepted": r.accepted, "rejected": r.rejected,
                          "acceptance_rate": r.acceptance_rate,
                          "role_composition": r.role_composition}
                         for r in m.rows],
                "overall_rate": m.overall_rate,
                "total_generated": m.total_generated,
                "pending": len(engine.board.pending())}

    def _goal_json(report):
        return {"goal": report.goal, "columns": report.column_names,
                "rows": [row.columns for row in report.rows],
                "metadata": report.metadata, "tsv": report.to_tsv()}

    @app.get("/api/analysis/goal1", dependencies=[guarded])
    async def goal1():
        return _goal_json(engine.goal1_report())

    @app.get("/api/analysis/goal2", dependencies=[guarded])
    async def goal2():
        return _goal_json(engine.goal2_report())

    @app.get("/api/analysis/permutation", dependencies=[guarded])
    async def permutation(indicator: str = "SP_total",
                          n_permutations: int | None = None,
                          seed: int | None = None):
        result = engine.permutation_report(indicator, n_permutations, seed)
        return {"indicator": result.indicator,
                "observed_delta": result.observed_delta,
                "null_interval_95": list(result.null_interval_95),
                "percentile": result.percentile,
                "empirical_p_two_tailed": result.empirical_p_two_tailed,
                "n_permutations": result.n_permutations,
                "seed": result.seed,
                "n_strata_used": result.n_strata_used,
                "n_strata_excluded": result.n_strata_excluded}

    @app.get("/api/analysis/balance", dependencies=[guarded])
    async def balance():
        table = engine.balance_report()
        return {"rows": [{"metric": r.metric, "value_without": r.value_without,
                          "value_with": r.value_with, "difference": r.difference}
                         for r in table.rows],
                "tsv": table.to_tsv()}

    return app


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8400):
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(engine), host=host, port=port, log_level="info")
