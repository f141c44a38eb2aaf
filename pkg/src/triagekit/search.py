"""Inverted-index TF-IDF retrieval with filters, date ranges and four bands.

The index is rebuilt from a corpus (never mutated in place); searching is
pure. Scores are cosine similarities in [0, 1] banded into four classes;
the thresholds are deployment configuration, echoed in every response.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime

from triagekit.errors import (
    EmptyCorpus,
    FormatVersionMismatch,
    InvalidDateRange,
    MalformedThresholds,
    UnknownFilterField,
    UnknownTicket,
)
from triagekit.model import Corpus, TicketRecord, parse_timestamp, format_timestamp
from triagekit.textpipe import PipelineConfig, default_pipeline, tokenize

INDEX_MAGIC = "triagekit-index"
INDEX_FORMAT_VERSION = 1

BAND_DUPLICATE = "duplicate_likely"
BAND_STRONG = "strongly_related"
BAND_RELATED = "related"
BAND_WEAK = "weak"
BANDS = (BAND_DUPLICATE, BAND_STRONG, BAND_RELATED, BAND_WEAK)

DEFAULT_SUMMARY_BOOST = 2


@dataclass(frozen=True)
class BandThresholds:
    """Cut points for the four similarity classes (t1 > t2 > t3, in (0,1))."""

    duplicate: float = 0.80
    strong: float = 0.60
    related: float = 0.40

    def validate(self) -> "BandThresholds":
        values = (self.duplicate, self.strong, self.related)
        if not all(0.0 < v < 1.0 for v in values):
            raise MalformedThresholds(f"thresholds must lie in (0,1), got {values}")
        if not (self.duplicate > self.strong > self.related):
            raise MalformedThresholds(f"thresholds must be strictly decreasing, got {values}")
        return self

    def to_dict(self) -> dict:
        return {"duplicate": self.duplicate, "strong": self.strong, "related": self.related}


DEFAULT_THRESHOLDS = BandThresholds()


def categorize_similarity(score: float, thresholds: BandThresholds = DEFAULT_THRESHOLDS) -> str:
    """Total and exclusive: every score in [0,1] lands in exactly one band."""
    thresholds.validate()
    if score >= thresholds.duplicate:
        return BAND_DUPLICATE
    if score >= thresholds.strong:
        return BAND_STRONG
    if score >= thresholds.related:
        return BAND_RELATED
    return BAND_WEAK


@dataclass(frozen=True)
class Query:
    text: str
    filters: tuple[tuple[str, str], ...] = ()
    date_from: datetime | None = None
    date_to: datetime | None = None
    k: int = 10


@dataclass(frozen=True)
class SearchHit:
    ticket_id: str
    score: float
    band: str
    matched_terms: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "ticket_id": self.ticket_id,
            "score": self.score,
            "band": self.band,
            "matched_terms": list(self.matched_terms),
        }


@dataclass
class InvertedIndex:
    """Postings over ticket text, self-contained for serialization.

    Document text is summary tokens repeated summary_boost times followed by
    description tokens; postings store raw tf, norms store the Euclidean
    length of the tf-idf vector.
    """

    vocabulary: dict[str, int]
    postings: dict[int, list[tuple[int, float]]]
    idf: list[float]
    doc_norms: list[float]
    ticket_ids: list[str]
    summary_boost: int = DEFAULT_SUMMARY_BOOST

    @property
    def doc_count(self) -> int:
        return len(self.ticket_ids)

    def to_dict(self) -> dict:
        return {
            "magic": INDEX_MAGIC,
            "format_version": INDEX_FORMAT_VERSION,
            "vocabulary": self.vocabulary,
            "postings": {str(t): [[d, w] for d, w in plist] for t, plist in self.postings.items()},
            "idf": self.idf,
            "doc_norms": self.doc_norms,
            "ticket_ids": self.ticket_ids,
            "summary_boost": self.summary_boost,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InvertedIndex":
        if data.get("magic") != INDEX_MAGIC or data.get("format_version") != INDEX_FORMAT_VERSION:
            raise FormatVersionMismatch(
                f"expected {INDEX_MAGIC} v{INDEX_FORMAT_VERSION}, "
                f"got {data.get('magic')!r} v{data.get('format_version')!r}"
            )
        return cls(
            vocabulary={k: int(v) for k, v in data["vocabulary"].items()},
            postings={
                int(t): [(int(d), float(w)) for d, w in plist]
                for t, plist in data["postings"].items()
            },
            idf=[float(x) for x in data["idf"]],
            doc_norms=[float(x) for x in data["doc_norms"]],
            ticket_ids=list(data["ticket_ids"]),
            summary_boost=int(data.get("summary_boost", DEFAULT_SUMMARY_BOOST)),
        )


def document_text(ticket: TicketRecord, summary_boost: int = DEFAULT_SUMMARY_BOOST) -> str:
    """The exact text a ticket contributes to the index (summary boosted)."""
    parts = [ticket.summary] * summary_boost + [ticket.description]
    return " ".join(p for p in parts if p)


def document_term_counts(
    ticket: TicketRecord,
    vocabulary: dict[str, int],
    config: PipelineConfig,
    summary_boost: int,
) -> dict[int, float]:
    counts: dict[int, float] = {}
    for text, repeat in ((ticket.summary, summary_boost), (ticket.description, 1)):
        if not text:
            continue
        for token in tokenize(text, config):
            term_id = vocabulary.get(token.normalized)
            if term_id is not None:
                counts[term_id] = counts.get(term_id, 0.0) + repeat
    return counts


def build_index(
    corpus: Corpus,
    config: PipelineConfig | None = None,
    summary_boost: int = DEFAULT_SUMMARY_BOOST,
) -> InvertedIndex:
    """Deterministic full rebuild; same corpus gives a bit-identical index."""
    config = config or default_pipeline()
    if not corpus.tickets:
        raise EmptyCorpus("cannot index an empty corpus")

    vocab = corpus.vocabulary
    n_docs = len(corpus.tickets)
    per_doc: list[dict[int, float]] = []
    df = [0] * len(vocab)
    for ticket in corpus.tickets:
        counts = document_term_counts(ticket, vocab, config, summary_boost)
        per_doc.append(counts)
        for term_id in counts:
            df[term_id] += 1

    idf = [math.log(n_docs / d) if d > 0 else 0.0 for d in df]

    postings: dict[int, list[tuple[int, float]]] = {}
    doc_norms = []
    for ordinal, counts in enumerate(per_doc):
        sq = 0.0
        for term_id, tf in counts.items():
            postings.setdefault(term_id, []).append((ordinal, tf))
            sq += (tf * idf[term_id]) ** 2
        doc_norms.append(math.sqrt(sq))

    return InvertedIndex(
        vocabulary=dict(vocab),
        postings={t: postings[t] for t in sorted(postings)},
        idf=idf,
        doc_norms=doc_norms,
        ticket_ids=[t.id for t in corpus.tickets],
        summary_boost=summary_boost,
    )


def query_vector(
    index: InvertedIndex, text: str, config: PipelineConfig | None = None
) -> dict[int, float]:
    """tf-idf weights of the query; terms outside the vocabulary are dropped."""
    config = config or default_pipeline()
    counts: dict[int, float] = {}
    for token in tokenize(text, config):
        term_id = index.vocabulary.get(token.normalized)
        if term_id is not None:
            counts[term_id] = counts.get(term_id, 0.0) + 1.0
    return {t: tf * index.idf[t] for t, tf in counts.items() if index.idf[t] != 0.0}


def _candidate_ordinals(corpus: Corpus, query: Query) -> list[int]:
    filter_fields = {}
    for f in corpus.schema:
        if f.role == "filter":
            filter_fields[f.name] = f.filter_level
    for name, _ in query.filters:
        if name not in filter_fields:
            raise UnknownFilterField(f"field {name!r} is not a filter field in the schema", name)
    if query.date_from and query.date_to and query.date_from > query.date_to:
        raise InvalidDateRange("date_from is after date_to")

    # conjunction is order independent; normalize to hierarchy order
    active = sorted(query.filters, key=lambda nv: (filter_fields[nv[0]], nv[0]))

    out = []
    for ordinal, ticket in enumerate(corpus.tickets):
        ok = all(ticket.field_value(name) == value for name, value in active)
        if ok and (query.date_from or query.date_to):
            created = ticket.created_date
            if created is None:
                ok = False
            else:
                if query.date_from and created < query.date_from:
                    ok = False
                if query.date_to and created > query.date_to:
                    ok = False
        if ok:
            out.append(ordinal)
    return out


def _doc_tf(index: InvertedIndex, ordinal: int, term_id: int) -> float:
    plist = index.postings.get(term_id, [])
    at = bisect_left(plist, (ordinal, -math.inf))
    if at < len(plist) and plist[at][0] == ordinal:
        return plist[at][1]
    return 0.0


def search(
    index: InvertedIndex,
    corpus: Corpus,
    query: Query,
    thresholds: BandThresholds = DEFAULT_THRESHOLDS,
    config: PipelineConfig | None = None,
) -> list[SearchHit]:
    """Top-k candidates by (cosine desc, ticket id asc), each banded.

    The candidate set is every document passing the filters and date range;
    zero-score candidates still rank (by id), matching a brute-force scan.
    """
    thresholds.validate()
    config = config or default_pipeline()
    candidates = _candidate_ordinals(corpus, query)
    if not candidates:
        return []
    candidate_set = set(candidates)

    qvec = query_vector(index, query.text, config)
    qnorm = math.sqrt(sum(w * w for w in qvec.values()))

    dots: dict[int, float] = {}
    for term_id, qw in qvec.items():
        for ordinal, tf in index.postings.get(term_id, ()):
            if ordinal in candidate_set:
                dots[ordinal] = dots.get(ordinal, 0.0) + qw * (tf * index.idf[term_id])

    scored = []
    for ordinal in candidates:
        denom = qnorm * index.doc_norms[ordinal]
        score = dots.get(ordinal, 0.0) / denom if denom > 0 else 0.0
        scored.append((min(1.0, max(0.0, score)), index.ticket_ids[ordinal], ordinal))
    scored.sort(key=lambda row: (-row[0], row[1]))

    id_to_term = {tid: term for term, tid in index.vocabulary.items()}
    hits = []
    for score, ticket_id, ordinal in scored[: query.k]:
        matched = tuple(
            sorted(id_to_term[t] for t in qvec if _doc_tf(index, ordinal, t) > 0.0)
        )
        hits.append(
            SearchHit(
                ticket_id=ticket_id,
                score=score,
                band=categorize_similarity(score, thresholds),
                matched_terms=matched,
            )
        )
    return hits


def explain_hit(
    index: InvertedIndex,
    corpus: Corpus,
    query: Query,
    ticket_id: str,
    config: PipelineConfig | None = None,
) -> list[tuple[str, float]]:
    """Per-term additive contributions to the query/document dot product.

    Contributions sum to score * query_norm * doc_norm exactly (they are the
    dot product's terms); sorted by contribution descending then term.
    """
    config = config or default_pipeline()
    try:
        ordinal = index.ticket_ids.index(ticket_id)
    except ValueError:
        raise UnknownTicket(f"ticket {ticket_id!r} is not indexed") from None

    qvec = query_vector(index, query.text, config)
    id_to_term = {tid: term for term, tid in index.vocabulary.items()}
    contributions = []
    for term_id, qw in qvec.items():
        tf = _doc_tf(index, ordinal, term_id)
        if tf > 0.0:
            contributions.append((id_to_term[term_id], qw * tf * index.idf[term_id]))
    contributions.sort(key=lambda pair: (-pair[1], pair[0]))
    return contributions


def brute_force_search(
    index: InvertedIndex,
    corpus: Corpus,
    query: Query,
    thresholds: BandThresholds = DEFAULT_THRESHOLDS,
    config: PipelineConfig | None = None,
) -> list[SearchHit]:
    """Exhaustive cosine scan over the candidate set; the ranking oracle.

    Kept separate from search() on purpose: it rebuilds every document's
    tf-idf vector from the postings and scores without the inverted walk.
    """
    thresholds.validate()
    config = config or default_pipeline()
    candidates = _candidate_ordinals(corpus, query)
    qvec = query_vector(index, query.text, config)
    qnorm = math.sqrt(sum(w * w for w in qvec.values()))

    # term-major reconstruction of each doc's dense-ish vector
    doc_vectors: dict[int, dict[int, float]] = {o: {} for o in candidates}
    candidate_set = set(candidates)
    for term_id, plist in index.postings.items():
        for ordinal, tf in plist:
            if ordinal in candidate_set:
                doc_vectors[ordinal][term_id] = tf * index.idf[term_id]

    scored = []
    for ordinal in candidates:
        dvec = doc_vectors[ordinal]
        dot = sum(qw * dvec.get(t, 0.0) for t, qw in qvec.items())
        dnorm = math.sqrt(sum(w * w for w in dvec.values()))
        denom = qnorm * dnorm
        score = dot / denom if denom > 0 else 0.0
        scored.append((min(1.0, max(0.0, score)), index.ticket_ids[ordinal]))
    scored.sort(key=lambda row: (-row[0], row[1]))

    return [
        SearchHit(tid, s, categorize_similarity(s, thresholds), ())
        for s, tid in scored[: query.k]
    ]


def parse_date_range(date_from: str | None, date_to: str | None) -> tuple[datetime | None, datetime | None]:
    lo = parse_timestamp(date_from) if date_from else None
    hi = parse_timestamp(date_to) if date_to else None
    if lo and hi and lo > hi:
        raise InvalidDateRange(f"{format_timestamp(lo)} is after {format_timestamp(hi)}")
    return lo, hi
