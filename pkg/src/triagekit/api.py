"""HTTP/JSON service exposing every capability for the triage console.

Thin wrappers over the library calls: a handler validates the request,
takes the right exclusive lock, calls the module function, and echoes
versions and configuration back so clients never hard-code thresholds.
Long jobs (training, topic models, cross-validation) can run as polled
background jobs; corpora at desk scale run synchronously.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Form, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from triagekit import classify, evaluation, themes as themes_mod
from triagekit.errors import (
    ConcurrentJob,
    EmptyText,
    SchemaValidationError,
    TicketRejected,
    TriageError,
)
from triagekit.ingest import IngestConfig, ingest
from triagekit.model import Corpus, FieldSchema, default_schema, parse_timestamp, validate_schema
from triagekit.search import (
    BandThresholds,
    InvertedIndex,
    Query,
    build_index,
    explain_hit,
    parse_date_range,
    search,
)
from triagekit.store import (
    KIND_CORPUS,
    KIND_INDEX,
    KIND_MODEL,
    FeedbackLog,
    Store,
)

SYNC_TICKET_LIMIT = 2000

_STATUS_BY_CODE = {
    "EmptyText": 400,
    "InvalidDateRange": 400,
    "MalformedThresholds": 400,
    "BadBandwidth": 400,
    "BadHyperparameters": 400,
    "RankTooLarge": 400,
    "LengthMismatch": 400,
    "MissingIdfTable": 400,
    "UnreadableSource": 400,
    "UnknownTicket": 404,
    "UnknownVersion": 404,
    "UnknownPhrase": 404,
    "NoModel": 404,
    "NoCorpus": 404,
    "DuplicateEventId": 409,
    "ConcurrentJob": 409,
}


class AppState:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.store = Store(self.data_dir / "store")
        self.feedback_log = FeedbackLog(self.data_dir / "feedback" / "events.jsonl")
        self.schema_path = self.data_dir / "config" / "fields.json"
        self.thresholds = BandThresholds()

        self.schema: list[FieldSchema] = self._load_schema()
        self.corpus: Corpus | None = None
        self.corpus_version: int | None = None
        self.index: InvertedIndex | None = None
        self.index_version: int | None = None
        self.models: dict[str, tuple[classify.ClassifierModel, int]] = {}
        self._phrase_cache: tuple[int, themes_mod.CorpusPhrases] | None = None

        self.locks = {kind: threading.Lock() for kind in (KIND_CORPUS, KIND_MODEL)}
        self.jobs: dict[str, dict] = {}
        self._restore()

    def _load_schema(self) -> list[FieldSchema]:
        if self.schema_path.exists():
            import json

            data = json.loads(self.schema_path.read_text("utf-8"))
            return [FieldSchema.from_dict(f) for f in data]
        return default_schema()

    def save_schema(self, schema: list[FieldSchema]) -> None:
        import json

        self.schema_path.parent.mkdir(parents=True, exist_ok=True)
        self.schema_path.write_text(
            json.dumps([f.to_dict() for f in schema], indent=2) + "\n", "utf-8"
        )
        self.schema = schema

    def _restore(self) -> None:
        try:
            payload, entry = self.store.load(KIND_CORPUS)
            self.corpus = Corpus.from_dict(payload)
            self.corpus_version = entry.version
        except TriageError:
            return
        try:
            payload, entry = self.store.load(KIND_INDEX)
            self.index = InvertedIndex.from_dict(payload)
            self.index_version = entry.version
        except TriageError:
            pass
        for entry in sorted(self.store.versions(KIND_MODEL), key=lambda e: e.version):
            payload, _ = self.store.load(KIND_MODEL, entry.version)
            model = classify.ClassifierModel.from_dict(payload)
            self.models[model.target_field] = (model, entry.version)

    # -- helpers -----------------------------------------------------------

    def require_corpus(self) -> Corpus:
        if self.corpus is None or self.index is None:
            raise TriageErrorWithCode("NoCorpus", "ingest a ticket log first")
        return self.corpus

    def corpus_phrases(self) -> themes_mod.CorpusPhrases:
        corpus = self.require_corpus()
        if self._phrase_cache and self._phrase_cache[0] == self.corpus_version:
            return self._phrase_cache[1]
        cp = themes_mod.extract_corpus_phrases(corpus)
        self._phrase_cache = (self.corpus_version or 0, cp)
        return cp

    def exclusive(self, kind: str):
        lock = self.locks[kind]
        if not lock.acquire(blocking=False):
            raise ConcurrentJob(f"an exclusive {kind} job is already running")
        return lock


class TriageErrorWithCode(TriageError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# -- request bodies ---------------------------------------------------------

class FieldSchemaIn(BaseModel):
    name: str
    kind: str = "predefined"
    role: str = "information"
    filter_level: int = 0
    column_mapping: str = ""
    datetime_format: Optional[str] = None


class SearchIn(BaseModel):
    text: str
    filters: list[tuple[str, str]] = Field(default_factory=list)
    date_from: Optional[str] = None
    date_to: Optional[str] = None
    k: int = 10
    explain: bool = True


class TicketIn(BaseModel):
    id: str = "query-ticket"
    summary: str = ""
    description: str = ""


class TrainIn(BaseModel):
    seed: int
    l2_lambda: float = 1e-4
    epochs: int = 20
    feedback_eta: float = 0.1
    exclude_code_dominated: bool = False


class RecommendIn(BaseModel):
    ticket: TicketIn
    recency_from: Optional[str] = None
    recency_to: Optional[str] = None
    train: Optional[TrainIn] = None
    retrain: bool = False


class FeedbackIn(BaseModel):
    event_id: str
    ticket_id: str
    target_field: str
    label: str
    verdict: str
    timestamp: Optional[str] = None


class ThemesIn(BaseModel):
    method: str
    seed: int
    tag_field: Optional[str] = None
    lsa_rank: int = 50
    n_topics: int = 20
    alpha: Optional[float] = None
    beta: float = 0.01
    iterations: int = 200
    burn_in: int = 50
    coverage_target: float = 0.85
    run_async: bool = False


class CvIn(BaseModel):
    target_field: str
    seed: int
    folds: int = 10
    run_async: bool = False


class PrecisionIn(BaseModel):
    k: int
    judgment_lines: list[str] = Field(default_factory=list)
    counts: list[tuple[int, int]] = Field(default_factory=list)


class CorrelationIn(BaseModel):
    target_field: str
    seed: int
    holdout: list[str]


def _target_from_path(target: str) -> str:
    mapping = {"assignee": "assignee", "business-process": "business_process"}
    if target not in mapping:
        raise TriageErrorWithCode("NoModel", f"unknown recommendation target {target!r}")
    return mapping[target]


def create_app(data_dir: str | Path) -> FastAPI:
    app = FastAPI(title="triagekit", version="0.1.0")
    state = AppState(data_dir)
    app.state.triage = state

    # the console may be served from another origin; single-team deployment,
    # no auth, so a permissive policy is fine
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(TriageError)
    async def on_domain_error(_: Request, exc: TriageError) -> JSONResponse:
        status = _STATUS_BY_CODE.get(exc.code, 422)
        return JSONResponse(status_code=status, content={"error": exc.to_dict()})

    @app.exception_handler(ValueError)
    async def on_value_error(_: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": {"code": "BadRequest", "message": str(exc)}}
        )

    def envelope(payload: dict) -> dict:
        payload.setdefault("corpus_version", state.corpus_version)
        payload.setdefault("thresholds", state.thresholds.to_dict())
        return payload

    # -- configuration ------------------------------------------------

    @app.get("/config/fields")
    def get_fields() -> dict:
        return envelope({"fields": [f.to_dict() for f in state.schema]})

    @app.put("/config/fields")
    def put_fields(fields: list[FieldSchemaIn]) -> dict:
        schema = [FieldSchema.from_dict(f.model_dump()) for f in fields]
        validate_schema(schema)
        state.save_schema(schema)
        return envelope({"fields": [f.to_dict() for f in schema]})

    # -- ingestion ------------------------------------------------------

    @app.post("/ingest")
    async def post_ingest(
        file: UploadFile,
        delimiter: str = Form(","),
        datetime_format: Optional[str] = Form(None),
        source_label: str = Form(""),
    ) -> dict:
        lock = state.exclusive(KIND_CORPUS)
        try:
            uploads = state.data_dir / "uploads"
            uploads.mkdir(parents=True, exist_ok=True)
            target = uploads / (file.filename or "upload.csv")
            target.write_bytes(await file.read())

            config = IngestConfig(
                source_path=str(target),
                delimiter=delimiter,
                datetime_format=datetime_format,
                source_label=source_label or (file.filename or ""),
            )
            corpus, report = ingest(config, state.schema)
            corpus_entry = state.store.persist(KIND_CORPUS, corpus.to_dict())
            index = build_index(corpus)
            index_entry = state.store.persist(KIND_INDEX, index.to_dict())

            state.corpus, state.corpus_version = corpus, corpus_entry.version
            state.index, state.index_version = index, index_entry.version
            state._phrase_cache = None
            return envelope(
                {
                    "report": report.to_dict(),
                    "corpus_version": corpus_entry.version,
                    "index_version": index_entry.version,
                    "corpus_hash": corpus_entry.sha256,
                }
            )
        finally:
            lock.release()

    # -- search ---------------------------------------------------------

    @app.post("/search")
    def post_search(body: SearchIn) -> dict:
        corpus = state.require_corpus()
        if not body.text.strip():
            raise EmptyText("search text must be non-empty")
        date_from, date_to = parse_date_range(body.date_from, body.date_to)
        query = Query(
            text=body.text,
            filters=tuple((f, v) for f, v in body.filters),
            date_from=date_from,
            date_to=date_to,
            k=body.k,
        )
        hits = search(state.index, corpus, query, state.thresholds)
        results = []
        for hit in hits:
            row: dict[str, Any] = hit.to_dict()
            if body.explain:
                row["explain"] = [
                    {"term": term, "contribution": value}
                    for term, value in explain_hit(state.index, corpus, query, hit.ticket_id)
                ]
            results.append(row)
        return envelope({"hits": results, "index_version": state.index_version})

    # -- recommendation ---------------------------------------------------

    def _ensure_model(target_field: str, train_cfg: Optional[TrainIn], retrain: bool):
        existing = state.models.get(target_field)
        if existing is not None and not retrain:
            return existing
        if train_cfg is None:
            raise TriageErrorWithCode(
                "NoModel",
                f"no trained model for {target_field}; supply a train config with a seed",
            )
        corpus = state.require_corpus()
        lock = state.exclusive(KIND_MODEL)
        try:
            config = classify.TrainConfig(
                seed=train_cfg.seed,
                l2_lambda=train_cfg.l2_lambda,
                epochs=train_cfg.epochs,
                feedback_eta=train_cfg.feedback_eta,
                exclude_code_dominated=train_cfg.exclude_code_dominated,
            )
            model = classify.train(corpus, target_field, config)
            entry = state.store.persist(KIND_MODEL, model.to_dict())
            state.models[target_field] = (model, entry.version)
            return state.models[target_field]
        finally:
            lock.release()

    @app.post("/recommend/{target}")
    def post_recommend(target: str, body: RecommendIn) -> dict:
        target_field = _target_from_path(target)
        model, version = _ensure_model(target_field, body.train, body.retrain)
        from triagekit.model import TicketRecord

        ticket = TicketRecord(
            id=body.ticket.id, summary=body.ticket.summary, description=body.ticket.description
        )
        recency_from = parse_timestamp(body.recency_from) if body.recency_from else None
        recency_to = parse_timestamp(body.recency_to) if body.recency_to else None
        rec = classify.predict(
            model,
            ticket,
            recency_from=recency_from,
            recency_to=recency_to,
            model_version=str(version),
        )
        return envelope({"recommendation": rec.to_dict(), "model_version": version})

    # -- feedback ---------------------------------------------------------

    @app.post("/feedback", status_code=202)
    def post_feedback(body: FeedbackIn) -> dict:
        corpus = state.require_corpus()
        existing = state.models.get(body.target_field)
        if existing is None:
            raise TriageErrorWithCode("NoModel", f"no trained model for {body.target_field}")
        model, _ = existing

        from triagekit.model import utc_now

        event = classify.FeedbackEvent(
            event_id=body.event_id,
            ticket_id=body.ticket_id,
            target_field=body.target_field,
            label=body.label,
            verdict=body.verdict,
            timestamp=parse_timestamp(body.timestamp) if body.timestamp else utc_now(),
        )
        updated = classify.apply_feedback(model, event, corpus)
        state.feedback_log.append(event)
        entry = state.store.persist(KIND_MODEL, updated.to_dict())
        state.models[body.target_field] = (updated, entry.version)
        return envelope({"model_version": entry.version, "event_id": event.event_id})

    # -- themes -----------------------------------------------------------

    # Reports computed over HTTP are returned, never persisted: only
    # /ingest, /feedback and /config/fields may mutate state. Versioned
    # report snapshots are the CLI's job.
    def _run_themes(body: ThemesIn) -> dict:
        corpus = state.require_corpus()
        config = themes_mod.ThemeConfig(
            seed=body.seed,
            lsa_rank=body.lsa_rank,
            n_topics=body.n_topics,
            alpha=body.alpha,
            beta=body.beta,
            iterations=body.iterations,
            burn_in=body.burn_in,
            coverage_target=body.coverage_target,
        )
        report = themes_mod.mine_themes(
            corpus, body.method, config, tag_field=body.tag_field, cp=state.corpus_phrases()
        )
        return envelope({"report": {"report_type": "themes", **report.to_dict()}})

    @app.post("/themes")
    def post_themes(body: ThemesIn) -> Any:
        corpus = state.require_corpus()
        if body.run_async or len(corpus.tickets) > SYNC_TICKET_LIMIT:
            return _submit_job(lambda: _run_themes(body))
        return _run_themes(body)

    @app.get("/themes/pair")
    def get_theme_pair(p: str, q: str) -> dict:
        corpus = state.require_corpus()
        evidence = themes_mod.pair_evidence(state.corpus_phrases(), corpus, p, q)
        return envelope({"evidence": evidence.to_dict()})

    # -- evaluation ---------------------------------------------------------

    def _run_cv(body: CvIn) -> dict:
        corpus = state.require_corpus()
        report = evaluation.cross_validate(corpus, body.target_field, body.folds, body.seed)
        return envelope({"report": {"report_type": "cross_validation", **report.to_dict()}})

    @app.post("/evaluate/cv")
    def post_evaluate_cv(body: CvIn) -> Any:
        corpus = state.require_corpus()
        if body.run_async or len(corpus.tickets) > SYNC_TICKET_LIMIT:
            return _submit_job(lambda: _run_cv(body))
        return _run_cv(body)

    @app.post("/evaluate/precision-at-k")
    def post_evaluate_precision(body: PrecisionIn) -> dict:
        if body.judgment_lines:
            per_query = evaluation.load_judgment_lines(body.judgment_lines)
            counts = evaluation.judgment_counts(per_query, body.k)
        else:
            counts = [(int(r), int(rr)) for r, rr in body.counts]
        report = evaluation.precision_at_k(counts, body.k)
        return envelope({"report": {"report_type": "precision_at_k", **report.to_dict()}})

    @app.post("/evaluate/correlation")
    def post_evaluate_correlation(body: CorrelationIn) -> dict:
        corpus = state.require_corpus()
        config = classify.TrainConfig(seed=body.seed)
        report = evaluation.correlation_study(corpus, body.target_field, body.holdout, config)
        return envelope({"report": {"report_type": "correlation", **report.to_dict()}})

    # -- versions and jobs ---------------------------------------------------

    @app.get("/versions")
    def get_versions() -> dict:
        return envelope({"versions": [v.to_dict() for v in state.store.versions()]})

    def _submit_job(fn) -> JSONResponse:
        job_id = uuid.uuid4().hex[:12]
        state.jobs[job_id] = {"status": "running", "result": None, "error": None}

        def runner() -> None:
            try:
                state.jobs[job_id]["result"] = fn()
                state.jobs[job_id]["status"] = "done"
            except TriageError as exc:
                state.jobs[job_id]["error"] = exc.to_dict()
                state.jobs[job_id]["status"] = "error"
            except Exception as exc:  # pragma: no cover - defensive
                state.jobs[job_id]["error"] = {"code": "Internal", "message": str(exc)}
                state.jobs[job_id]["status"] = "error"

        threading.Thread(target=runner, daemon=True).start()
        return JSONResponse(status_code=202, content={"job_id": job_id, "status": "running"})

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        job = state.jobs.get(job_id)
        if job is None:
            raise TriageErrorWithCode("UnknownVersion", f"no job {job_id!r}")
        return {"job_id": job_id, **job}

    return app
