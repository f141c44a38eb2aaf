"""Schema and ticket validation, vocabulary building, corpus round trips."""

import pytest

from triagekit.errors import SchemaValidationError, TicketRejected
from triagekit.model import (
    Corpus,
    FieldSchema,
    TicketRecord,
    build_vocabulary,
    default_schema,
    validate_schema,
    validate_ticket,
)
from tests.conftest import make_ticket


def schema_with_filters(levels: list[int]) -> list[FieldSchema]:
    fields = default_schema()
    fields = [f for f in fields if f.role != "filter"]
    for i, level in enumerate(levels):
        fields.append(
            FieldSchema(
                name=f"region{i}",
                kind="custom",
                role="filter",
                filter_level=level,
                column_mapping=f"Region{i}",
            )
        )
    return fields


class TestValidateSchema:
    def test_contiguous_hierarchy_valid(self):
        schema = schema_with_filters([1, 2, 3])
        assert validate_schema(schema) is schema

    def test_gap_in_levels(self):
        with pytest.raises(SchemaValidationError) as exc:
            validate_schema(schema_with_filters([1, 3]))
        assert "NonContiguousFilterLevels" in exc.value.codes()

    def test_duplicate_column_mapping(self):
        schema = default_schema()
        schema.append(FieldSchema(name="extra", kind="custom", column_mapping="Summary"))
        with pytest.raises(SchemaValidationError) as exc:
            validate_schema(schema)
        assert "DuplicateColumnMapping" in exc.value.codes()

    def test_filter_without_level(self):
        schema = default_schema()
        schema.append(
            FieldSchema(name="region", kind="custom", role="filter", filter_level=0,
                        column_mapping="Region")
        )
        with pytest.raises(SchemaValidationError) as exc:
            validate_schema(schema)
        assert "FilterWithoutLevel" in exc.value.codes()

    def test_all_violations_reported_not_just_first(self):
        schema = schema_with_filters([1, 3])
        schema.append(FieldSchema(name="extra", kind="custom", column_mapping="Summary"))
        schema.append(
            FieldSchema(name="bad", kind="custom", role="filter", filter_level=0,
                        column_mapping="Bad")
        )
        with pytest.raises(SchemaValidationError) as exc:
            validate_schema(schema)
        assert {"NonContiguousFilterLevels", "DuplicateColumnMapping", "FilterWithoutLevel"} <= exc.value.codes()

    def test_idempotent(self):
        schema = default_schema()
        assert validate_schema(validate_schema(schema)) is schema


class TestValidateTicket:
    def test_one_text_field_suffices(self):
        ticket = make_ticket(1, "login fails", "")
        assert validate_ticket(ticket, default_schema()) is ticket

    def test_empty_text_rejected(self):
        ticket = make_ticket(1, "", "")
        with pytest.raises(TicketRejected) as exc:
            validate_ticket(ticket, default_schema())
        assert exc.value.code == "EmptyText"

    def test_unknown_custom_field(self):
        ticket = TicketRecord(id="T1", summary="x", custom={"Region": "apac"})
        with pytest.raises(TicketRejected) as exc:
            validate_ticket(ticket, default_schema())
        assert exc.value.code == "UnknownCustomField"

    def test_bad_status(self):
        ticket = make_ticket(1, "x", status="Bogus")
        with pytest.raises(TicketRejected) as exc:
            validate_ticket(ticket, default_schema())
        assert exc.value.code == "BadStatus"

    def test_status_vocabulary_extendable(self):
        ticket = make_ticket(1, "x", status="Deferred")
        vocab = frozenset({"Open", "Deferred"})
        assert validate_ticket(ticket, default_schema(), vocab) is ticket


class TestBuildVocabulary:
    def test_distinct_tokens(self):
        tickets = [make_ticket(1, "alpha beta"), make_ticket(2, "beta gamma")]
        vocab = build_vocabulary(tickets)
        assert len(vocab) == 3
        assert set(vocab) == {"alpha", "beta", "gamma"}

    def test_empty_corpus(self):
        assert build_vocabulary([]) == {}

    def test_deterministic(self):
        tickets = [make_ticket(1, "alpha beta"), make_ticket(2, "beta gamma")]
        assert build_vocabulary(tickets) == build_vocabulary(tickets)

    def test_ids_dense_bijection(self):
        tickets = [make_ticket(i, f"word{i} shared") for i in range(1, 8)]
        vocab = build_vocabulary(tickets)
        assert sorted(vocab.values()) == list(range(len(vocab)))


class TestCorpus:
    def test_duplicate_ids_rejected(self):
        tickets = [make_ticket(1, "a one"), make_ticket(1, "b two")]
        with pytest.raises(TicketRejected) as exc:
            Corpus.build(default_schema(), tickets)
        assert exc.value.code == "DuplicateId"

    def test_round_trip(self, toy_corpus):
        rebuilt = Corpus.from_dict(toy_corpus.to_dict())
        assert rebuilt == toy_corpus
        assert rebuilt.content_hash() == toy_corpus.content_hash()

    def test_ticket_lookup(self, toy_corpus):
        assert toy_corpus.ticket_by_id("T0002").module_tag == "billing"
        assert toy_corpus.ticket_by_id("missing") is None
        assert toy_corpus.ordinal_of("T0001") == 0

    def test_field_value_resolution(self, toy_corpus):
        ticket = toy_corpus.tickets[0]
        assert ticket.field_value("module_tag") == "web"
        assert ticket.field_value("created_date").startswith("2023-01-01")
