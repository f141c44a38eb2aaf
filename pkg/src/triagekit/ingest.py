"""Column-mapped CSV ingestion with per-row quarantine.

Exported ticket logs arrive as delimited UTF-8 text with a header row
(binary spreadsheets are converted upstream). Rows that fail validation
are quarantined into the ingest report with their row number and reason,
never silently dropped: corpus size + quarantined rows = data rows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from triagekit.errors import (
    EmptyAfterQuarantine,
    MissingColumn,
    TicketRejected,
    UnreadableSource,
)
from triagekit.model import (
    Corpus,
    DEFAULT_STATUS_VOCABULARY,
    FieldSchema,
    TicketRecord,
    validate_schema,
    validate_ticket,
)
from triagekit.textpipe import PipelineConfig

DEFAULT_DATETIME_FORMAT = "%Y-%m-%d %H:%M:%S"


@dataclass(frozen=True)
class IngestConfig:
    source_path: str
    delimiter: str = ","
    header: bool = True
    datetime_format: str | None = None  # overrides the schema's per-field format
    source_label: str = ""
    encoding: str = "utf-8"

    def to_dict(self) -> dict:
        return {
            "source_path": self.source_path,
            "delimiter": self.delimiter,
            "header": self.header,
            "datetime_format": self.datetime_format,
            "source_label": self.source_label,
            "encoding": self.encoding,
        }


@dataclass(frozen=True)
class QuarantinedRow:
    row_number: int  # 1-based data row, header excluded
    ticket_id: str
    code: str
    message: str

    def to_dict(self) -> dict:
        return {
            "row_number": self.row_number,
            "ticket_id": self.ticket_id,
            "code": self.code,
            "message": self.message,
        }


@dataclass
class IngestReport:
    source_label: str
    total_rows: int
    ingested: int
    quarantined: list[QuarantinedRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "source_label": self.source_label,
            "total_rows": self.total_rows,
            "ingested": self.ingested,
            "quarantined": [q.to_dict() for q in self.quarantined],
        }


def _parse_created(value: str, fmt: str) -> datetime:
    parsed = datetime.strptime(value.strip(), fmt)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def ingest(
    config: IngestConfig,
    schema: list[FieldSchema],
    pipeline: PipelineConfig | None = None,
    status_vocabulary: frozenset[str] = DEFAULT_STATUS_VOCABULARY,
) -> tuple[Corpus, IngestReport]:
    """Parse, map columns per schema, validate each row, build the corpus.

    Deterministic for identical (file bytes, config, schema): re-ingesting
    the same file yields an identical corpus content hash.
    """
    validate_schema(schema)
    path = Path(config.source_path)
    try:
        raw = path.read_text(encoding=config.encoding)
    except OSError as exc:
        raise UnreadableSource(f"cannot read {config.source_path}: {exc}") from exc

    rows = list(csv.reader(raw.splitlines(), delimiter=config.delimiter))
    if not rows:
        raise UnreadableSource(f"{config.source_path} is empty")

    if config.header:
        header, data_rows = rows[0], rows[1:]
    else:
        header = [f.column_mapping for f in schema]
        data_rows = rows
    column_at = {name.strip(): i for i, name in enumerate(header)}

    for f in schema:
        if f.column_mapping not in column_at:
            raise MissingColumn(f"mapped column {f.column_mapping!r} not in header", f.name)

    date_field = next((f for f in schema if f.name == "created_date"), None)
    date_format = config.datetime_format or (
        date_field.datetime_format if date_field and date_field.datetime_format else DEFAULT_DATETIME_FORMAT
    )

    tickets: list[TicketRecord] = []
    quarantined: list[QuarantinedRow] = []
    seen_ids: set[str] = set()

    for row_number, row in enumerate(data_rows, start=1):
        values: dict[str, str] = {}
        for f in schema:
            at = column_at[f.column_mapping]
            values[f.name] = row[at].strip() if at < len(row) else ""

        ticket_id = values.get("id", "")
        created = None
        raw_date = values.get("created_date", "")
        if raw_date:
            try:
                created = _parse_created(raw_date, date_format)
            except ValueError:
                quarantined.append(
                    QuarantinedRow(
                        row_number,
                        ticket_id,
                        "BadDate",
                        f"{raw_date!r} does not match format {date_format!r}",
                    )
                )
                continue

        custom = {
            f.name: values[f.name]
            for f in schema
            if f.kind == "custom" and values.get(f.name, "")
        }
        ticket = TicketRecord(
            id=ticket_id,
            summary=values.get("summary", ""),
            description=values.get("description", ""),
            assignee=values.get("assignee", ""),
            business_process=values.get("business_process", ""),
            created_date=created,
            module_tag=values.get("module_tag", ""),
            priority=values.get("priority", ""),
            status=values.get("status", ""),
            custom=custom,
        )

        try:
            validate_ticket(ticket, schema, status_vocabulary)
        except TicketRejected as exc:
            quarantined.append(QuarantinedRow(row_number, ticket_id, exc.code, exc.message))
            continue
        if ticket.id in seen_ids:
            quarantined.append(
                QuarantinedRow(row_number, ticket_id, "DuplicateId", f"id {ticket_id!r} already ingested")
            )
            continue
        seen_ids.add(ticket.id)
        tickets.append(ticket)

    if not tickets:
        raise EmptyAfterQuarantine(
            f"all {len(data_rows)} rows quarantined; nothing to ingest"
        )

    corpus = Corpus.build(schema, tickets, pipeline, status_vocabulary)
    report = IngestReport(
        source_label=config.source_label,
        total_rows=len(data_rows),
        ingested=len(tickets),
        quarantined=quarantined,
    )
    return corpus, report
