"""Central-problem-area mining over extracted phrases.

Four base scorers (term frequency, tf-idf, latent-semantic centrality,
topic-model probability) plus reciprocal-rank fusion of their rankings.
Central terms are picked greedily until the covered-ticket fraction reaches
the target; every report also carries per-tag spread so analysts can see
where a theme concentrates.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime

from triagekit import lda as lda_mod
from triagekit.errors import UnknownPhrase, UnknownTagField
from triagekit.linalg import truncated_svd
from triagekit.model import Corpus, format_timestamp, ticket_tokens, utc_now
from triagekit.textpipe import PipelineConfig, default_pipeline, extract_phrases

METHODS = (
    "TF",
    "TF_IDF",
    "LSA",
    "LDA",
    "LSA+TF",
    "LSA+TF_IDF",
    "LSA+LDA",
    "LDA+TF",
    "LDA+TF_IDF",
)

RRF_CONSTANT = 60

LSA_FORMULA_ROW_NORM = "sigma-weighted-row-norm"


@dataclass(frozen=True)
class ThemeConfig:
    seed: int = 0
    lsa_rank: int = 50
    lsa_formula: str = LSA_FORMULA_ROW_NORM
    n_topics: int = 20
    alpha: float | None = None  # defaults to 50 / n_topics
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    coverage_target: float = 0.85

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "lsa_rank": self.lsa_rank,
            "lsa_formula": self.lsa_formula,
            "n_topics": self.n_topics,
            "alpha": self.alpha if self.alpha is not None else 50.0 / self.n_topics,
            "beta": self.beta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "coverage_target": self.coverage_target,
        }


@dataclass
class CorpusPhrases:
    """Corpus-wide phrase extraction, shared by every scoring method."""

    phrases: list[str]
    phrase_ids: dict[str, int]
    doc_counts: list[Counter]          # per doc: phrase id -> occurrences
    doc_sequences: list[list[int]]     # per doc: phrase ids in extraction order
    doc_tokens: list[tuple[str, ...]]  # per doc: normalized token sequence
    _incidence: dict[str, frozenset[int]] = field(default_factory=dict)

    @property
    def doc_count(self) -> int:
        return len(self.doc_counts)

    def incidence(self, phrase: str) -> frozenset[int]:
        """Doc ordinals where the phrase occurs as a contiguous token run."""
        cached = self._incidence.get(phrase)
        if cached is None:
            needle = tuple(phrase.split(" "))
            cached = frozenset(
                d for d, seq in enumerate(self.doc_tokens) if _contains_run(seq, needle)
            )
            self._incidence[phrase] = cached
        return cached


def _contains_run(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    first = needle[0]
    for at in range(len(haystack) - len(needle) + 1):
        if haystack[at] == first and haystack[at : at + len(needle)] == needle:
            return True
    return False


def extract_corpus_phrases(corpus: Corpus, config: PipelineConfig | None = None) -> CorpusPhrases:
    config = config or default_pipeline()
    phrases: list[str] = []
    phrase_ids: dict[str, int] = {}
    doc_counts: list[Counter] = []
    doc_sequences: list[list[int]] = []
    doc_tokens: list[tuple[str, ...]] = []

    for ticket in corpus.tickets:
        tokens = ticket_tokens(ticket, config)
        doc_tokens.append(tuple(t.normalized for t in tokens))
        counts: Counter = Counter()
        sequence: list[int] = []
        for phrase in extract_phrases(tokens, config):
            text = phrase.text
            pid = phrase_ids.get(text)
            if pid is None:
                pid = len(phrases)
                phrase_ids[text] = pid
                phrases.append(text)
            counts[pid] += 1
            sequence.append(pid)
        doc_counts.append(counts)
        doc_sequences.append(sequence)

    return CorpusPhrases(
        phrases=phrases,
        phrase_ids=phrase_ids,
        doc_counts=doc_counts,
        doc_sequences=doc_sequences,
        doc_tokens=doc_tokens,
    )


# --- base scorers ---------------------------------------------------------

def score_tf(cp: CorpusPhrases) -> dict[str, float]:
    """Total corpus frequency of each phrase."""
    totals = Counter()
    for counts in cp.doc_counts:
        totals.update(counts)
    return {cp.phrases[pid]: float(n) for pid, n in totals.items()}

def _phrase_df(cp: CorpusPhrases) -> Counter:
    df: Counter = Counter()
    for counts in cp.doc_counts:
        df.update(set(counts))
    return df


def score_tf_idf(cp: CorpusPhrases) -> dict[str, float]:
    """Sum over documents of tf(p, d) * ln(N / df(p))."""
    n_docs = cp.doc_count
    df = _phrase_df(cp)
    idf = {pid: math.log(n_docs / d) for pid, d in df.items()}
    scores: dict[str, float] = {}
    for counts in cp.doc_counts:
        for pid, tf in counts.items():
            scores[cp.phrases[pid]] = scores.get(cp.phrases[pid], 0.0) + tf * idf[pid]
    return scores


def score_lsa(cp: CorpusPhrases, rank: int, seed: int = 0) -> dict[str, float]:
    """Latent-semantic centrality: norm of each phrase's row of U*Sigma.

    The phrase-document matrix holds tf-idf weights; RankTooLarge propagates
    when rank exceeds min(#phrases, #docs) or the matrix is empty.
    """
    import numpy as np

    n_docs = cp.doc_count
    n_phrases = len(cp.phrases)
    matrix = np.zeros((n_phrases, n_docs))
    df = _phrase_df(cp)
    for d, counts in enumerate(cp.doc_counts):
        for pid, tf in counts.items():
            matrix[pid, d] = tf * math.log(n_docs / df[pid])

    svd = truncated_svd(matrix, rank, seed=seed)
    weighted = svd.u * svd.s  # row i scaled per component
    centrality = np.sqrt((weighted**2).sum(axis=1))
    return {cp.phrases[i]: float(centrality[i]) for i in range(n_phrases)}


def score_lda(cp: CorpusPhrases, config: ThemeConfig) -> tuple[dict[str, float], lda_mod.LdaResult]:
    """Topic-model scores: per phrase, the best P(phrase | topic)."""
    result = lda_mod.collapsed_gibbs(
        documents=cp.doc_sequences,
        vocab_size=max(1, len(cp.phrases)),
        n_topics=config.n_topics,
        alpha=config.alpha,
        beta=config.beta,
        iterations=config.iterations,
        burn_in=config.burn_in,
        seed=config.seed,
    )
    scores = {phrase: result.term_score(pid) for phrase, pid in cp.phrase_ids.items()}
    return scores, result


def rank_phrases(scores: dict[str, float]) -> list[str]:
    """Score descending, ties broken by phrase ascending."""
    return [p for p, _ in sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))]


def fuse_rankings(rankings: list[tuple[str, list[str]]]) -> list[tuple[str, float]]:
    """Reciprocal-rank fusion: sum of 1 / (60 + rank), absent phrase adds 0."""
    if len(rankings) < 2:
        raise ValueError("fusion needs at least two rankings")
    fused: dict[str, float] = {}
    for _, ranked in rankings:
        for position, phrase in enumerate(ranked, start=1):
            fused[phrase] = fused.get(phrase, 0.0) + 1.0 / (RRF_CONSTANT + position)
    return sorted(fused.items(), key=lambda kv: (-kv[1], kv[0]))


# --- selection and reporting ----------------------------------------------

@dataclass(frozen=True)
class ThemeTerm:
    phrase: str
    method_scores: dict[str, float]
    fused_rank: int
    supporting_tickets: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "phrase": self.phrase,
            "method_scores": dict(self.method_scores),
            "fused_rank": self.fused_rank,
            "supporting_tickets": list(self.supporting_tickets),
        }


@dataclass(frozen=True)
class ThemePairEvidence:
    phrases: tuple[str, str]
    count: int
    ticket_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "phrases": list(self.phrases),
            "count": self.count,
            "ticket_ids": list(self.ticket_ids),
        }


@dataclass
class ThemeReport:
    method: str
    terms: list[ThemeTerm]
    coverage: float
    coverage_target: float
    spread: dict[str, float]
    tag_field: str | None
    corpus_version: str
    config: ThemeConfig
    generated_at: datetime = field(default_factory=utc_now)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "terms": [t.to_dict() for t in self.terms],
            "coverage": self.coverage,
            "coverage_target": self.coverage_target,
            "spread": dict(sorted(self.spread.items())),
            "tag_field": self.tag_field,
            "corpus_version": self.corpus_version,
            "config": self.config.to_dict(),
            "generated_at": format_timestamp(self.generated_at),
        }

    def to_table(self) -> str:
        from triagekit.reports import render_table

        rows = [
            [
                str(t.fused_rank),
                t.phrase,
                ", ".join(f"{m}={s:.4g}" for m, s in sorted(t.method_scores.items())),
                str(len(t.supporting_tickets)),
            ]
            for t in self.terms
        ]
        config = self.config.to_dict()
        header = (
            f"method={self.method}  coverage={self.coverage:.3f}"
            f" (target {self.coverage_target:.2f})  corpus={self.corpus_version[:12]}\n"
            + "  ".join(f"{k}={v}" for k, v in sorted(config.items()))
        )
        table = render_table(["rank", "phrase", "scores", "tickets"], rows)
        if self.spread:
            spread_rows = [[tag, f"{frac:.3f}"] for tag, frac in sorted(self.spread.items())]
            table += "\n\nspread by " + (self.tag_field or "") + "\n"
            table += render_table(["tag", "covered"], spread_rows)
        return header + "\n" + table


def select_central_terms(
    ranked: list[str], cp: CorpusPhrases, coverage_target: float = 0.85
) -> tuple[list[str], float]:
    """Greedy walk: keep a phrase only if it strictly grows coverage.

    Stops once the covered fraction reaches the target or the ranking is
    exhausted; the achieved coverage is reported either way.
    """
    selected: list[str] = []
    covered: set[int] = set()
    n_docs = cp.doc_count
    if n_docs == 0:
        return [], 0.0
    for phrase in ranked:
        docs = cp.incidence(phrase)
        if docs - covered:
            selected.append(phrase)
            covered |= docs
            if len(covered) / n_docs >= coverage_target:
                break
    return selected, len(covered) / n_docs


def compute_spread(
    selected: list[str], corpus: Corpus, cp: CorpusPhrases, tag_field: str
) -> dict[str, float]:
    """Per tag value: fraction of that tag's tickets containing a selected term."""
    if corpus.schema_field(tag_field) is None:
        raise UnknownTagField(f"field {tag_field!r} not in schema", tag_field)

    covered: set[int] = set()
    for phrase in selected:
        covered |= cp.incidence(phrase)

    groups: dict[str, list[int]] = {}
    for ordinal, ticket in enumerate(corpus.tickets):
        value = ticket.field_value(tag_field)
        if value:
            groups.setdefault(value, []).append(ordinal)

    return {
        value: sum(1 for o in ordinals if o in covered) / len(ordinals)
        for value, ordinals in groups.items()
    }


def evaluate_recall(
    mined: list[str], gold: list[str], config: PipelineConfig | None = None
) -> float:
    """Fraction of gold themes matched by normalized containment.

    Both sides are run through the tokenizer (case folding, stemming,
    stopwords); a gold theme is recalled when its token sequence contains or
    is contained in some mined phrase's sequence as a contiguous run.
    """
    if not gold:
        raise ValueError("gold themes must be non-empty")
    config = config or default_pipeline()
    from triagekit.textpipe import tokenize

    def norm(text: str) -> tuple[str, ...]:
        return tuple(t.normalized for t in tokenize(text, config))

    mined_seqs = [norm(p) for p in mined]
    recalled = 0
    for theme in gold:
        g = norm(theme)
        if not g:
            continue
        for m in mined_seqs:
            if _contains_run(m, g) or _contains_run(g, m):
                recalled += 1
                break
    return recalled / len(gold)


def pair_evidence(cp: CorpusPhrases, corpus: Corpus, p: str, q: str) -> ThemePairEvidence:
    """Tickets where both phrases occur; the drill-down justification list."""
    for phrase in (p, q):
        if phrase not in cp.phrase_ids:
            raise UnknownPhrase(f"phrase {phrase!r} was not mined from this corpus")
    shared = sorted(cp.incidence(p) & cp.incidence(q))
    ids = tuple(corpus.tickets[o].id for o in shared)
    return ThemePairEvidence(phrases=(p, q), count=len(ids), ticket_ids=ids)


def mine_themes(
    corpus: Corpus,
    method: str,
    config: ThemeConfig | None = None,
    tag_field: str | None = None,
    pipeline: PipelineConfig | None = None,
    cp: CorpusPhrases | None = None,
) -> ThemeReport:
    """Run one method (or fused pair) end to end and build the report."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    config = config or ThemeConfig()
    cp = cp or extract_corpus_phrases(corpus, pipeline)

    if not cp.phrases:
        return ThemeReport(
            method=method,
            terms=[],
            coverage=0.0,
            coverage_target=config.coverage_target,
            spread={},
            tag_field=tag_field,
            corpus_version=corpus.content_hash(),
            config=config,
        )

    base_scores: dict[str, dict[str, float]] = {}
    for base in method.split("+"):
        if base == "TF":
            base_scores[base] = score_tf(cp)
        elif base == "TF_IDF":
            base_scores[base] = score_tf_idf(cp)
        elif base == "LSA":
            rank = min(config.lsa_rank, len(cp.phrases), cp.doc_count)
            base_scores[base] = score_lsa(cp, rank, seed=config.seed)
        elif base == "LDA":
            base_scores[base], _ = score_lda(cp, config)

    parts = method.split("+")
    if len(parts) == 1:
        ranked = rank_phrases(base_scores[parts[0]])
    else:
        fused = fuse_rankings([(p, rank_phrases(base_scores[p])) for p in parts])
        ranked = [phrase for phrase, _ in fused]

    selected, coverage = select_central_terms(ranked, cp, config.coverage_target)
    rank_of = {phrase: i + 1 for i, phrase in enumerate(ranked)}
    terms = [
        ThemeTerm(
            phrase=phrase,
            method_scores={m: s.get(phrase, 0.0) for m, s in base_scores.items()},
            fused_rank=rank_of[phrase],
            supporting_tickets=tuple(
                corpus.tickets[o].id for o in sorted(cp.incidence(phrase))
            ),
        )
        for phrase in selected
    ]

    spread = compute_spread(selected, corpus, cp, tag_field) if tag_field else {}
    return ThemeReport(
        method=method,
        terms=terms,
        coverage=coverage,
        coverage_target=config.coverage_target,
        spread=spread,
        tag_field=tag_field,
        corpus_version=corpus.content_hash(),
        config=config,
    )
