"""Text processing: tokens, code-term detection, phrases, sparse vectors.

Ticket text in maintenance logs mixes ordinary prose with cryptic
team-internal codes (``#*ZX12*#``, ``JSP045ABCD``). Those codes carry
exact-match value for retrieval, so the tokenizer keeps each one as a
single atomic token instead of shredding it on punctuation.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from triagekit.errors import MissingIdfTable

WORD = "word"
CODE_TERM = "code_term"
NUMBER = "number"

NOUN_PHRASE = "noun_phrase"
VERB_PHRASE = "verb_phrase"

# Kept out of the stopword list on purpose: verb particles that matter in
# incident text ("logged out", "timed out", "backed up").
PARTICLES = frozenset({"up", "down", "off", "out", "over", "back"})

_DELIMITED_CODE = re.compile(r"#\*.*?\*#", re.S)
_ALNUM_RUN = re.compile(r"[A-Za-z0-9]+")
_CHUNK = re.compile(r"\S+")
_HASH_CODE = re.compile(r"#[A-Za-z0-9]")


def _load_resource(name: str) -> frozenset[str]:
    text = resources.files("triagekit.resources").joinpath(name).read_text("utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line)
    return frozenset(entries)


@dataclass(frozen=True)
class PipelineConfig:
    """Tokenizer and phrase-chunker knobs; defaults come from resource files."""

    stopwords: frozenset[str] = field(default_factory=lambda: _load_resource("stopwords.txt"))
    verb_lexicon: frozenset[str] = field(default_factory=lambda: _load_resource("verbs.txt"))
    adjective_lexicon: frozenset[str] = field(default_factory=lambda: _load_resource("adjectives.txt"))
    stem: bool = True
    keep_code_terms: bool = True
    max_phrase_len: int = 4


@lru_cache(maxsize=1)
def default_pipeline() -> PipelineConfig:
    return PipelineConfig()


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    kind: str
    position: int


@dataclass(frozen=True)
class Phrase:
    tokens: tuple[Token, ...]
    kind: str

    @property
    def text(self) -> str:
        return " ".join(t.normalized for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class SparseVector:
    """Sorted (term-id, weight) pairs; zero weights are never stored."""

    entries: tuple[tuple[int, float], ...]

    def norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))

    def dot(self, other: "SparseVector") -> float:
        mine = dict(self.entries)
        return sum(w * mine[t] for t, w in other.entries if t in mine)

    def cosine(self, other: "SparseVector") -> float:
        denom = self.norm() * other.norm()
        if denom == 0.0:
            return 0.0
        return min(1.0, max(0.0, self.dot(other) / denom))

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def stem(word: str) -> str:
    """Light suffix stripper (plural / -ed / -ing), iterated to a fixpoint.

    Idempotence matters: stopword checks and re-tokenization both rely on
    stem(stem(x)) == stem(x).
    """
    while True:
        if len(word) >= 5 and word.endswith("ies"):
            word = word[:-3] + "y"
            continue
        if word.endswith(("ss", "us", "is")):
            break
        if len(word) >= 4 and word.endswith("s"):
            word = word[:-1]
            continue
        if len(word) >= 6 and word.endswith("ing"):
            word = word[:-3]
            continue
        if len(word) >= 5 and word.endswith("ed"):
            word = word[:-2]
            continue
        break
    return word


def detect_code_terms(text: str) -> list[tuple[int, int]]:
    """Spans of code terms: ``#*...*#`` regions plus cryptic-token heuristics.

    A whitespace chunk (stripped of surrounding punctuation) is cryptic when
    it contains ``#`` followed by an alphanumeric, or is >= 6 chars long with
    at least 2 digits and 2 letters. Returned spans are disjoint and sorted.
    """
    spans: list[tuple[int, int]] = [m.span() for m in _DELIMITED_CODE.finditer(text)]
    taken = list(spans)

    def overlaps(start: int, end: int) -> bool:
        return any(s < end and start < e for s, e in taken)

    for m in _CHUNK.finditer(text):
        chunk, start = m.group(), m.start()
        if overlaps(start, m.end()):
            continue
        lo = 0
        while lo < len(chunk) and not (chunk[lo].isalnum() or chunk[lo] == "#"):
            lo += 1
        hi = len(chunk)
        while hi > lo and not chunk[hi - 1].isalnum():
            hi -= 1
        core = chunk[lo:hi]
        if not core:
            continue
        digits = sum(c.isdigit() for c in core)
        letters = sum(c.isalpha() for c in core)
        if _HASH_CODE.search(core) or (len(core) >= 6 and digits >= 2 and letters >= 2):
            spans.append((start + lo, start + hi))

    spans.sort()
    return spans


def tokenize(text: str, config: PipelineConfig | None = None) -> list[Token]:
    """Split, lowercase, stem, drop stopwords; code terms stay atomic.

    ``position`` is the token's index in the raw stream (stopwords consume a
    position even though they are not emitted), so phrase chunking can tell
    true adjacency from a removed-stopword gap.
    """
    config = config or default_pipeline()
    if not text:
        return []

    spans = detect_code_terms(text)
    raw: list[tuple[str, str]] = []  # (surface, kind)
    cursor = 0
    for start, end in spans:
        for m in _ALNUM_RUN.finditer(text, cursor, start):
            raw.append((m.group(), NUMBER if m.group().isdigit() else WORD))
        raw.append((text[start:end], CODE_TERM))
        cursor = end
    for m in _ALNUM_RUN.finditer(text, cursor):
        raw.append((m.group(), NUMBER if m.group().isdigit() else WORD))

    out: list[Token] = []
    for position, (surface, kind) in enumerate(raw):
        if kind == CODE_TERM:
            if config.keep_code_terms:
                out.append(Token(surface, surface.lower(), CODE_TERM, position))
            continue
        if kind == NUMBER:
            out.append(Token(surface, surface, NUMBER, position))
            continue
        lowered = surface.lower()
        normalized = stem(lowered) if config.stem else lowered
        if lowered in config.stopwords or normalized in config.stopwords:
            continue
        out.append(Token(surface, normalized, WORD, position))
    return out


def _pos_tag(token: Token, config: PipelineConfig) -> str:
    if token.kind == WORD:
        if token.normalized in config.verb_lexicon:
            return "V"
        if token.normalized in config.adjective_lexicon:
            return "A"
    return "N"  # numbers, code terms, and unknown words default to Noun


def extract_phrases(tokens: Sequence[Token], config: PipelineConfig | None = None) -> list[Phrase]:
    """Chunk tokens into noun phrases (Adj* Noun+) and verb phrases.

    Chunks never bridge a removed-stopword gap (positions must be
    consecutive). Over-long noun runs are split into max_phrase_len pieces.
    """
    config = config or default_pipeline()
    tags = [_pos_tag(t, config) for t in tokens]
    phrases: list[Phrase] = []
    n = len(tokens)

    def adjacent(i: int) -> bool:
        return tokens[i + 1].position == tokens[i].position + 1

    i = 0
    while i < n:
        if tags[i] == "V":
            span = [tokens[i]]
            if i + 1 < n and adjacent(i) and (
                tags[i + 1] == "N" or tokens[i + 1].normalized in PARTICLES
            ):
                span.append(tokens[i + 1])
            phrases.append(Phrase(tuple(span), VERB_PHRASE))
            i += len(span)
            continue
        j = i
        while j < n and tags[j] == "A" and j + 1 < n and adjacent(j):
            j += 1
        k = j
        if k < n and tags[k] == "N":
            k += 1
            while k < n and tags[k] == "N" and adjacent(k - 1):
                k += 1
        if k > j:
            run = tokens[i:k]
            for at in range(0, len(run), config.max_phrase_len):
                piece = run[at : at + config.max_phrase_len]
                phrases.append(Phrase(tuple(piece), NOUN_PHRASE))
            i = k
        else:
            i += 1
    return phrases


def vectorize(
    items: Iterable[Token | Phrase | str],
    vocabulary: dict[str, int],
    weighting: str = "tf",
    idf_table: dict[int, float] | None = None,
) -> SparseVector:
    """Counts terms into a sparse vector; tf_idf multiplies by the idf table.

    Terms outside the vocabulary are dropped, as are zero weights (a term
    present in every document has idf 0 and never survives tf_idf).
    """
    if weighting not in ("tf", "tf_idf"):
        raise ValueError(f"unknown weighting {weighting!r}")
    if weighting == "tf_idf" and idf_table is None:
        raise MissingIdfTable("tf_idf weighting requires an idf table")

    counts: Counter[int] = Counter()
    for item in items:
        if isinstance(item, Token):
            term = item.normalized
        elif isinstance(item, Phrase):
            term = item.text
        else:
            term = item
        term_id = vocabulary.get(term)
        if term_id is not None:
            counts[term_id] += 1

    entries = []
    for term_id in sorted(counts):
        weight = float(counts[term_id])
        if weighting == "tf_idf":
            weight *= idf_table.get(term_id, 0.0)
        if weight != 0.0:
            entries.append((term_id, weight))
    return SparseVector(tuple(entries))


def idf_from_documents(documents: Iterable[Iterable[int]], doc_count: int) -> dict[int, float]:
    """Natural-log idf, ln(N / df), from documents given as term-id bags."""
    df: Counter[int] = Counter()
    for doc in documents:
        df.update(set(doc))
    return {t: math.log(doc_count / n) for t, n in df.items()}
