"""Command-line interface mirroring the HTTP endpoints for batch use.

Exit codes: 0 success, 1 domain error (validation, missing artifacts),
2 usage error (argparse). State lives in a data directory shared with the
service, so scripted runs and the console see the same versions.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from triagekit import classify, evaluation
from triagekit import themes as themes_mod
from triagekit.api import AppState, create_app
from triagekit.errors import TriageError
from triagekit.ingest import IngestConfig, ingest
from triagekit.model import FieldSchema, TicketRecord, validate_schema
from triagekit.reports import render_table
from triagekit.search import Query, build_index, parse_date_range, search
from triagekit.store import KIND_CORPUS, KIND_INDEX, KIND_MODEL, KIND_REPORT


def _emit(payload: dict, args, table: str | None = None) -> None:
    if args.output == "table" and table is not None:
        print(table)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _state(args) -> AppState:
    return AppState(args.data_dir)


def cmd_ingest(args) -> int:
    state = _state(args)
    if args.schema:
        fields = [FieldSchema.from_dict(f) for f in json.loads(Path(args.schema).read_text("utf-8"))]
        validate_schema(fields)
        state.save_schema(fields)

    config = IngestConfig(
        source_path=args.csv,
        delimiter=args.delimiter,
        datetime_format=args.datetime_format,
        source_label=args.source_label or Path(args.csv).name,
    )
    corpus, report = ingest(config, state.schema)
    corpus_entry = state.store.persist(KIND_CORPUS, corpus.to_dict())
    index = build_index(corpus)
    index_entry = state.store.persist(KIND_INDEX, index.to_dict())

    payload = {
        "report": report.to_dict(),
        "corpus_version": corpus_entry.version,
        "index_version": index_entry.version,
        "corpus_hash": corpus_entry.sha256,
    }
    rows = [[str(q.row_number), q.ticket_id, q.code, q.message] for q in report.quarantined]
    table = (
        f"ingested {report.ingested}/{report.total_rows} rows "
        f"(corpus v{corpus_entry.version}, index v{index_entry.version})"
    )
    if rows:
        table += "\nquarantined:\n" + render_table(["row", "id", "code", "reason"], rows)
    _emit(payload, args, table)
    return 0


def cmd_search(args) -> int:
    state = _state(args)
    corpus = state.require_corpus()
    filters = []
    for item in args.filter or []:
        if "=" not in item:
            raise TriageError(f"filter must look like field=value, got {item!r}")
        name, value = item.split("=", 1)
        filters.append((name, value))
    date_from, date_to = parse_date_range(args.date_from, args.date_to)
    query = Query(
        text=args.query,
        filters=tuple(filters),
        date_from=date_from,
        date_to=date_to,
        k=args.top,
    )
    hits = search(state.index, corpus, query, state.thresholds)
    payload = {
        "hits": [h.to_dict() for h in hits],
        "corpus_version": state.corpus_version,
        "thresholds": state.thresholds.to_dict(),
    }
    rows = [
        [h.ticket_id, f"{h.score:.4f}", h.band, ", ".join(h.matched_terms[:6])] for h in hits
    ]
    _emit(payload, args, render_table(["ticket", "score", "band", "matched"], rows))
    return 0


def _target_field(raw: str) -> str:
    return {"assignee": "assignee", "business-process": "business_process",
            "business_process": "business_process"}[raw]


def cmd_recommend(args) -> int:
    state = _state(args)
    target_field = _target_field(args.target)
    existing = state.models.get(target_field)
    if existing is None or args.retrain:
        if args.seed is None:
            raise TriageError("training a model needs an explicit --seed")
        corpus = state.require_corpus()
        config = classify.TrainConfig(seed=args.seed, epochs=args.epochs)
        model = classify.train(corpus, target_field, config)
        entry = state.store.persist(KIND_MODEL, model.to_dict())
        state.models[target_field] = (model, entry.version)
    model, version = state.models[target_field]

    ticket = TicketRecord(id="query-ticket", summary=args.summary, description=args.description)
    recency_from, recency_to = parse_date_range(args.recency_from, args.recency_to)
    rec = classify.predict(
        model, ticket, recency_from=recency_from, recency_to=recency_to, model_version=str(version)
    )
    payload = {"recommendation": rec.to_dict(), "model_version": version}
    rows = [[label, f"{score:.4f}"] for label, score in rec.ranked[: args.top]]
    _emit(payload, args, render_table(["label", "score"], rows))
    return 0


def cmd_feedback(args) -> int:
    state = _state(args)
    corpus = state.require_corpus()
    target_field = _target_field(args.target)
    existing = state.models.get(target_field)
    if existing is None:
        raise TriageError(f"no trained model for {target_field}; run recommend first")
    model, _ = existing

    from triagekit.model import utc_now

    event = classify.FeedbackEvent(
        event_id=args.event_id,
        ticket_id=args.ticket_id,
        target_field=target_field,
        label=args.label,
        verdict=args.verdict,
        timestamp=utc_now(),
    )
    updated = classify.apply_feedback(model, event, corpus)
    state.feedback_log.append(event)
    entry = state.store.persist(KIND_MODEL, updated.to_dict())
    state.models[target_field] = (updated, entry.version)
    payload = {"model_version": entry.version, "event_id": event.event_id}
    _emit(payload, args, f"recorded {args.verdict} for {args.label!r} (model v{entry.version})")
    return 0


def cmd_themes(args) -> int:
    state = _state(args)
    corpus = state.require_corpus()
    config = themes_mod.ThemeConfig(
        seed=args.seed,
        lsa_rank=args.lsa_rank,
        n_topics=args.topics,
        iterations=args.iterations,
        burn_in=min(args.burn_in, max(0, args.iterations - 1)),
        coverage_target=args.coverage,
    )
    report = themes_mod.mine_themes(corpus, args.method, config, tag_field=args.tag_field)
    payload = {"report_type": "themes", **report.to_dict()}
    state.store.persist(KIND_REPORT, payload)

    if args.gold:
        gold = [l.strip() for l in Path(args.gold).read_text("utf-8").splitlines() if l.strip()]
        ranking = [t.phrase for t in report.terms]
        payload["recall_at_50"] = themes_mod.evaluate_recall(ranking[:50], gold)

    _emit(payload, args, report.to_table())
    return 0


def cmd_evaluate(args) -> int:
    state = _state(args)
    if args.what == "cv":
        corpus = state.require_corpus()
        report = evaluation.cross_validate(
            corpus, _target_field(args.target), folds=args.folds, seed=args.seed
        )
        payload = {"report_type": "cross_validation", **report.to_dict()}
        state.store.persist(KIND_REPORT, payload)
        _emit(payload, args, report.to_table())
    elif args.what == "precision-at-k":
        lines = Path(args.judgments).read_text("utf-8").splitlines()
        per_query = evaluation.load_judgment_lines(lines)
        counts = evaluation.judgment_counts(per_query, args.k)
        report = evaluation.precision_at_k(counts, args.k)
        payload = {"report_type": "precision_at_k", **report.to_dict()}
        state.store.persist(KIND_REPORT, payload)
        table = render_table(
            ["k", "precision(relevant)", "precision(relevant+related)"],
            [[str(report.k), f"{report.precision_relevant:.4f}",
              f"{report.precision_relevant_or_related:.4f}"]],
        )
        _emit(payload, args, table)
    else:  # correlation
        corpus = state.require_corpus()
        holdout = [
            l.strip() for l in Path(args.holdout).read_text("utf-8").splitlines() if l.strip()
        ]
        report = evaluation.correlation_study(
            corpus, _target_field(args.target), holdout, classify.TrainConfig(seed=args.seed)
        )
        payload = {"report_type": "correlation", **report.to_dict()}
        state.store.persist(KIND_REPORT, payload)
        rows = [[l, str(c), f"{a:.4f}"] for l, c, a in report.pairs]
        table = render_table(["label", "trained-on", "accuracy"], rows)
        table += f"\n\nPearson r = {report.r:.4f}" if report.r is not None else (
            f"\n\nPearson r unavailable: {report.error}"
        )
        _emit(payload, args, table)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triagekit", description="Ticket intelligence for maintenance logs."
    )
    parser.add_argument("--data-dir", default="triagekit-data", help="state directory")
    parser.add_argument("--output", choices=("json", "table"), default="table")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a delimited ticket log")
    p.add_argument("--csv", required=True)
    p.add_argument("--schema", help="JSON file with the field schema")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--datetime-format", default=None)
    p.add_argument("--source-label", default="")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("search", help="find similar tickets")
    p.add_argument("--query", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--filter", action="append", metavar="FIELD=VALUE")
    p.add_argument("--from", dest="date_from", default=None)
    p.add_argument("--to", dest="date_to", default=None)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("recommend", help="rank assignees or business processes")
    p.add_argument("--target", required=True, choices=("assignee", "business-process"))
    p.add_argument("--summary", required=True)
    p.add_argument("--description", default="")
    p.add_argument("--seed", type=int, default=None, help="training seed (required to train)")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--retrain", action="store_true")
    p.add_argument("--recency-from", default=None)
    p.add_argument("--recency-to", default=None)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(fn=cmd_recommend)

    p = sub.add_parser("feedback", help="record an accept/reject verdict")
    p.add_argument("--event-id", required=True)
    p.add_argument("--ticket-id", required=True)
    p.add_argument("--target", required=True, choices=("assignee", "business-process"))
    p.add_argument("--label", required=True)
    p.add_argument("--verdict", required=True, choices=("accepted", "rejected"))
    p.set_defaults(fn=cmd_feedback)

    p = sub.add_parser("themes", help="mine central problem areas")
    p.add_argument("--method", required=True, choices=themes_mod.METHODS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tag-field", default=None)
    p.add_argument("--lsa-rank", type=int, default=50)
    p.add_argument("--topics", type=int, default=20)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--burn-in", type=int, default=50)
    p.add_argument("--coverage", type=float, default=0.85)
    p.add_argument("--gold", help="file of gold themes (one per line) for recall@50")
    p.set_defaults(fn=cmd_themes)

    p = sub.add_parser("evaluate", help="run an evaluation protocol")
    ev = p.add_subparsers(dest="what", required=True)

    e = ev.add_parser("cv", help="stratified cross-validation")
    e.add_argument("--target", required=True, choices=("assignee", "business-process", "business_process"))
    e.add_argument("--folds", type=int, default=10)
    e.add_argument("--seed", type=int, required=True)
    e.set_defaults(fn=cmd_evaluate)

    e = ev.add_parser("precision-at-k", help="precision over judged results")
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--judgments", required=True, help="query-id,ticket-id,judgment lines")
    e.set_defaults(fn=cmd_evaluate)

    e = ev.add_parser("correlation", help="ticket-count vs accuracy study")
    e.add_argument("--target", required=True, choices=("assignee", "business-process", "business_process"))
    e.add_argument("--holdout", required=True, help="file of holdout ticket ids")
    e.add_argument("--seed", type=int, required=True)
    e.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8030)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except TriageError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
