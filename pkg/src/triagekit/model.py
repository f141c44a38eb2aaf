"""Domain model: ticket records, field schema, corpus, shared vocabulary.

The schema mirrors how maintenance tools export ticket logs: a fixed set of
predefined fields (id, summary, description, assignee, business process,
created date, module, priority, status) plus free-form custom fields. Each
field is either informational or a filter; filter fields form a hierarchy
(level 1 at the top, like Country -> State -> City).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable

from triagekit.errors import SchemaValidationError, TicketRejected, Violation
from triagekit.textpipe import PipelineConfig, default_pipeline, tokenize

PREDEFINED_FIELDS = (
    "id",
    "summary",
    "description",
    "assignee",
    "business_process",
    "created_date",
    "module_tag",
    "priority",
    "status",
)

DEFAULT_STATUS_VOCABULARY = frozenset({"Closed", "Open", "Assigned", "Re-Opened"})

ROLE_INFORMATION = "information"
ROLE_FILTER = "filter"

KIND_PREDEFINED = "predefined"
KIND_CUSTOM = "custom"


@dataclass(frozen=True)
class FieldSchema:
    """One configured field: where it comes from and how search may use it."""

    name: str
    kind: str = KIND_PREDEFINED
    role: str = ROLE_INFORMATION
    filter_level: int = 0
    column_mapping: str = ""
    datetime_format: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "role": self.role,
            "filter_level": self.filter_level,
            "column_mapping": self.column_mapping,
            "datetime_format": self.datetime_format,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FieldSchema":
        return cls(
            name=data["name"],
            kind=data.get("kind", KIND_PREDEFINED),
            role=data.get("role", ROLE_INFORMATION),
            filter_level=int(data.get("filter_level", 0)),
            column_mapping=data.get("column_mapping", ""),
            datetime_format=data.get("datetime_format"),
        )


@dataclass(frozen=True)
class TicketRecord:
    id: str
    summary: str = ""
    description: str = ""
    assignee: str = ""
    business_process: str = ""
    created_date: datetime | None = None
    module_tag: str = ""
    priority: str = ""
    status: str = ""
    custom: dict[str, str] = field(default_factory=dict)

    def text_fields(self) -> tuple[str, str]:
        return self.summary, self.description

    def field_value(self, name: str) -> str:
        """Value of a predefined or custom field, as a string."""
        if name in PREDEFINED_FIELDS:
            value = getattr(self, name)
            if name == "created_date":
                return format_timestamp(value) if value else ""
            return value
        return self.custom.get(name, "")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "summary": self.summary,
            "description": self.description,
            "assignee": self.assignee,
            "business_process": self.business_process,
            "created_date": format_timestamp(self.created_date) if self.created_date else None,
            "module_tag": self.module_tag,
            "priority": self.priority,
            "status": self.status,
            "custom": dict(sorted(self.custom.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TicketRecord":
        raw_date = data.get("created_date")
        return cls(
            id=data["id"],
            summary=data.get("summary", ""),
            description=data.get("description", ""),
            assignee=data.get("assignee", ""),
            business_process=data.get("business_process", ""),
            created_date=parse_timestamp(raw_date) if raw_date else None,
            module_tag=data.get("module_tag", ""),
            priority=data.get("priority", ""),
            status=data.get("status", ""),
            custom=dict(data.get("custom", {})),
        )


def format_timestamp(value: datetime) -> str:
    return value.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(value: str) -> datetime:
    return datetime.strptime(value, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds (the model's resolution)."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def default_schema() -> list[FieldSchema]:
    """Table-style default schema: module as the single level-1 filter."""
    columns = {
        "id": "ID",
        "summary": "Summary",
        "description": "Description",
        "assignee": "Assignee",
        "business_process": "Business Process",
        "created_date": "Created Date",
        "module_tag": "Module",
        "priority": "Priority",
        "status": "Status",
    }
    out = []
    for name in PREDEFINED_FIELDS:
        role = ROLE_FILTER if name == "module_tag" else ROLE_INFORMATION
        out.append(
            FieldSchema(
                name=name,
                kind=KIND_PREDEFINED,
                role=role,
                filter_level=1 if role == ROLE_FILTER else 0,
                column_mapping=columns[name],
                datetime_format="%Y-%m-%d %H:%M:%S" if name == "created_date" else None,
            )
        )
    return out


def validate_schema(schema: list[FieldSchema]) -> list[FieldSchema]:
    """Check every schema invariant, reporting all violations at once.

    Raises SchemaValidationError whose ``violations`` carry codes
    DuplicateColumnMapping, FilterWithoutLevel, LevelWithoutFilter and
    NonContiguousFilterLevels.
    """
    if not schema:
        raise SchemaValidationError([Violation("EmptySchema", "", "schema must not be empty")])

    violations: list[Violation] = []

    seen: dict[str, str] = {}
    for f in schema:
        if f.column_mapping in seen:
            violations.append(
                Violation(
                    "DuplicateColumnMapping",
                    f.name,
                    f"column {f.column_mapping!r} already mapped by field {seen[f.column_mapping]!r}",
                )
            )
        else:
            seen[f.column_mapping] = f.name

    levels = []
    for f in schema:
        if f.role == ROLE_FILTER and f.filter_level < 1:
            violations.append(
                Violation("FilterWithoutLevel", f.name, f"filter field {f.name!r} needs filter_level >= 1")
            )
        elif f.role != ROLE_FILTER and f.filter_level != 0:
            violations.append(
                Violation("LevelWithoutFilter", f.name, f"field {f.name!r} has a filter_level but role is not filter")
            )
        if f.role == ROLE_FILTER and f.filter_level >= 1:
            levels.append(f.filter_level)

    if levels:
        expected = set(range(1, len(set(levels)) + 1))
        if set(levels) != expected:
            violations.append(
                Violation(
                    "NonContiguousFilterLevels",
                    "",
                    f"filter levels {sorted(set(levels))} must form a contiguous range starting at 1",
                )
            )

    if violations:
        raise SchemaValidationError(violations)
    return schema


def validate_ticket(
    ticket: TicketRecord,
    schema: list[FieldSchema],
    status_vocabulary: frozenset[str] = DEFAULT_STATUS_VOCABULARY,
) -> TicketRecord:
    """Accept or raise TicketRejected (EmptyText / UnknownCustomField / BadStatus / EmptyId)."""
    if not ticket.id:
        raise TicketRejected("EmptyId", "ticket id must be non-empty", "id")
    if not ticket.summary.strip() and not ticket.description.strip():
        raise TicketRejected("EmptyText", "summary and description are both empty", "summary")
    known = {f.name for f in schema}
    for key in ticket.custom:
        if key not in known:
            raise TicketRejected("UnknownCustomField", f"custom field {key!r} not in schema", key)
    if ticket.status and ticket.status not in status_vocabulary:
        raise TicketRejected("BadStatus", f"status {ticket.status!r} not in configured vocabulary", "status")
    return ticket


def ticket_tokens(ticket: TicketRecord, config: PipelineConfig | None = None):
    """Tokens of summary then description in one stream.

    Description positions are shifted past the summary with a gap of 2 so
    phrase chunking never joins tokens across the field boundary.
    """
    config = config or default_pipeline()
    summary = tokenize(ticket.summary, config)
    description = tokenize(ticket.description, config)
    if summary and description:
        offset = summary[-1].position + 2
        description = [replace(t, position=t.position + offset) for t in description]
    return summary + description


def build_vocabulary(
    tickets: Iterable[TicketRecord], config: PipelineConfig | None = None
) -> dict[str, int]:
    """Dense term -> id map in first-seen order; deterministic per input order."""
    config = config or default_pipeline()
    vocab: dict[str, int] = {}
    for ticket in tickets:
        for token in ticket_tokens(ticket, config):
            if token.normalized not in vocab:
                vocab[token.normalized] = len(vocab)
    return vocab


@dataclass(frozen=True)
class Corpus:
    """Immutable snapshot of validated tickets plus the shared vocabulary."""

    schema: tuple[FieldSchema, ...]
    tickets: tuple[TicketRecord, ...]
    vocabulary: dict[str, int]
    ingested_at: datetime

    @classmethod
    def build(
        cls,
        schema: list[FieldSchema],
        tickets: list[TicketRecord],
        config: PipelineConfig | None = None,
        status_vocabulary: frozenset[str] = DEFAULT_STATUS_VOCABULARY,
        ingested_at: datetime | None = None,
    ) -> "Corpus":
        validate_schema(schema)
        seen_ids: set[str] = set()
        for t in tickets:
            validate_ticket(t, schema, status_vocabulary)
            if t.id in seen_ids:
                raise TicketRejected("DuplicateId", f"ticket id {t.id!r} appears twice", "id")
            seen_ids.add(t.id)
        vocab = build_vocabulary(tickets, config)
        return cls(
            schema=tuple(schema),
            tickets=tuple(tickets),
            vocabulary=vocab,
            ingested_at=ingested_at or utc_now(),
        )

    def ticket_by_id(self, ticket_id: str) -> TicketRecord | None:
        index = self._id_index()
        ordinal = index.get(ticket_id)
        return self.tickets[ordinal] if ordinal is not None else None

    def ordinal_of(self, ticket_id: str) -> int | None:
        return self._id_index().get(ticket_id)

    def _id_index(self) -> dict[str, int]:
        cached = getattr(self, "_id_cache", None)
        if cached is None:
            cached = {t.id: i for i, t in enumerate(self.tickets)}
            object.__setattr__(self, "_id_cache", cached)
        return cached

    def schema_field(self, name: str) -> FieldSchema | None:
        for f in self.schema:
            if f.name == name:
                return f
        return None

    def to_dict(self) -> dict:
        return {
            "schema": [f.to_dict() for f in self.schema],
            "tickets": [t.to_dict() for t in self.tickets],
            "vocabulary": self.vocabulary,
            "ingested_at": format_timestamp(self.ingested_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Corpus":
        return cls(
            schema=tuple(FieldSchema.from_dict(f) for f in data["schema"]),
            tickets=tuple(TicketRecord.from_dict(t) for t in data["tickets"]),
            vocabulary={k: int(v) for k, v in data["vocabulary"].items()},
            ingested_at=parse_timestamp(data["ingested_at"]),
        )

    def content_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode("utf-8")).hexdigest()


def canonical_json(payload: dict) -> str:
    """Stable serialization used for hashing and bit-exact round trips."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
