"""Assignee and business-process recommendation over tf-idf features.

One-vs-rest linear classifiers trained by stochastic subgradient descent on
hinge loss with L2 regularization (decaying 1/(lambda*t) steps, the bias as
an always-on regularized feature). Accept/reject feedback lands in an
additive per-(term, label) boost table on top of the frozen base weights,
so a model version is immutable and replayable.

A kernel-weighted nearest-neighbor mode approximates a Gaussian-kernel
classifier for fidelity experiments; the linear route is the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import datetime

import numpy as np

from triagekit.errors import (
    BadBandwidth,
    DuplicateEventId,
    EmptyText,
    FormatVersionMismatch,
    TooFewExamples,
    TooFewLabels,
    UnknownLabel,
    UnknownTicket,
)
from triagekit.model import (
    Corpus,
    TicketRecord,
    canonical_json,
    format_timestamp,
    parse_timestamp,
    ticket_tokens,
    utc_now,
)
from triagekit.textpipe import CODE_TERM, PipelineConfig, default_pipeline

MODEL_MAGIC = "triagekit-model"
MODEL_FORMAT_VERSION = 1

TARGET_ASSIGNEE = "assignee"
TARGET_BUSINESS_PROCESS = "business_process"
TARGET_FIELDS = (TARGET_ASSIGNEE, TARGET_BUSINESS_PROCESS)

VERDICT_ACCEPTED = "accepted"
VERDICT_REJECTED = "rejected"


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    l2_lambda: float = 1e-4
    epochs: int = 20
    feedback_eta: float = 0.1
    kernel_k: int = 15
    kernel_gamma: float = 1.0
    exclude_code_dominated: bool = False
    code_dominance_threshold: float = 0.5

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "l2_lambda": self.l2_lambda,
            "epochs": self.epochs,
            "feedback_eta": self.feedback_eta,
            "kernel_k": self.kernel_k,
            "kernel_gamma": self.kernel_gamma,
            "exclude_code_dominated": self.exclude_code_dominated,
            "code_dominance_threshold": self.code_dominance_threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return cls(**{k: data[k] for k in cls().to_dict() if k in data})


@dataclass(frozen=True)
class FeedbackEvent:
    event_id: str
    ticket_id: str
    target_field: str
    label: str
    verdict: str
    timestamp: datetime

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "ticket_id": self.ticket_id,
            "target_field": self.target_field,
            "label": self.label,
            "verdict": self.verdict,
            "timestamp": format_timestamp(self.timestamp),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeedbackEvent":
        return cls(
            event_id=data["event_id"],
            ticket_id=data["ticket_id"],
            target_field=data["target_field"],
            label=data["label"],
            verdict=data["verdict"],
            timestamp=parse_timestamp(data["timestamp"]),
        )


@dataclass(frozen=True)
class Recommendation:
    target_field: str
    ranked: tuple[tuple[str, float], ...]
    model_version: str = ""
    recency_from: datetime | None = None
    recency_to: datetime | None = None

    def top(self) -> str:
        return self.ranked[0][0]

    def to_dict(self) -> dict:
        return {
            "target_field": self.target_field,
            "ranked": [{"label": l, "score": s} for l, s in self.ranked],
            "model_version": self.model_version,
            "recency_from": format_timestamp(self.recency_from) if self.recency_from else None,
            "recency_to": format_timestamp(self.recency_to) if self.recency_to else None,
        }


@dataclass
class ClassifierModel:
    """Immutable trained model; feedback produces a new instance."""

    target_field: str
    labels: list[str]
    weights: np.ndarray  # L x V base weights, never touched by feedback
    bias: np.ndarray     # L
    vocabulary: dict[str, int]
    idf: np.ndarray      # V, from the training documents
    feedback_boost: dict[tuple[int, str], float]
    label_dates: dict[str, list[str]]
    applied_event_ids: tuple[str, ...]
    trained_at: datetime
    config: TrainConfig

    def to_dict(self) -> dict:
        boosts = sorted(
            [t, l, v] for (t, l), v in self.feedback_boost.items() if v != 0.0
        )
        return {
            "magic": MODEL_MAGIC,
            "format_version": MODEL_FORMAT_VERSION,
            "target_field": self.target_field,
            "labels": self.labels,
            "weights": [[float(x) for x in row] for row in self.weights],
            "bias": [float(x) for x in self.bias],
            "vocabulary": self.vocabulary,
            "idf": [float(x) for x in self.idf],
            "feedback_boost": boosts,
            "label_dates": {k: list(v) for k, v in sorted(self.label_dates.items())},
            "applied_event_ids": sorted(self.applied_event_ids),
            "trained_at": format_timestamp(self.trained_at),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifierModel":
        if data.get("magic") != MODEL_MAGIC or data.get("format_version") != MODEL_FORMAT_VERSION:
            raise FormatVersionMismatch(
                f"expected {MODEL_MAGIC} v{MODEL_FORMAT_VERSION}, "
                f"got {data.get('magic')!r} v{data.get('format_version')!r}"
            )
        weights = np.array(data["weights"], dtype=np.float64)
        vocabulary = {k: int(v) for k, v in data["vocabulary"].items()}
        if weights.shape[1] != len(vocabulary):
            raise FormatVersionMismatch(
                f"weight matrix covers {weights.shape[1]} terms but vocabulary has {len(vocabulary)}"
            )
        return cls(
            target_field=data["target_field"],
            labels=list(data["labels"]),
            weights=weights,
            bias=np.array(data["bias"], dtype=np.float64),
            vocabulary=vocabulary,
            idf=np.array(data["idf"], dtype=np.float64),
            feedback_boost={(int(t), l): float(v) for t, l, v in data["feedback_boost"]},
            label_dates={k: list(v) for k, v in data["label_dates"].items()},
            applied_event_ids=tuple(data["applied_event_ids"]),
            trained_at=parse_timestamp(data["trained_at"]),
            config=TrainConfig.from_dict(data["config"]),
        )

    def fingerprint(self) -> str:
        import hashlib

        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()[:12]


def _feature_vector(
    ticket: TicketRecord,
    vocabulary: dict[str, int],
    idf: np.ndarray,
    config: PipelineConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """L2-normalized tf-idf feature ids/values for one ticket."""
    counts: dict[int, float] = {}
    for token in ticket_tokens(ticket, config):
        term_id = vocabulary.get(token.normalized)
        if term_id is not None:
            counts[term_id] = counts.get(term_id, 0.0) + 1.0
    ids = np.array(sorted(counts), dtype=np.int64)
    vals = np.array([counts[t] * idf[t] for t in ids], dtype=np.float64)
    keep = vals != 0.0
    ids, vals = ids[keep], vals[keep]
    norm = math.sqrt(float(vals @ vals))
    if norm > 0:
        vals = vals / norm
    return ids, vals


def _code_dominated(ticket: TicketRecord, config: PipelineConfig, threshold: float) -> bool:
    """Cryptic-code dominance is judged on the description field, the one
    that carries the noise in practice."""
    from triagekit.textpipe import tokenize

    tokens = tokenize(ticket.description, config)
    if not tokens:
        return False
    code = sum(1 for t in tokens if t.kind == CODE_TERM)
    return code / len(tokens) > threshold


def training_set(
    corpus: Corpus,
    target_field: str,
    config: TrainConfig,
    pipeline: PipelineConfig | None = None,
) -> tuple[list[TicketRecord], list[str]]:
    """Labeled tickets for a target field, minus code-dominated ones if configured."""
    pipeline = pipeline or default_pipeline()
    tickets, labels = [], []
    for ticket in corpus.tickets:
        label = getattr(ticket, target_field)
        if not label:
            continue
        if config.exclude_code_dominated and _code_dominated(
            ticket, pipeline, config.code_dominance_threshold
        ):
            continue
        tickets.append(ticket)
        labels.append(label)
    return tickets, labels


def train(
    corpus: Corpus,
    target_field: str,
    config: TrainConfig | None = None,
    tickets: list[TicketRecord] | None = None,
    labels: list[str] | None = None,
    pipeline: PipelineConfig | None = None,
) -> ClassifierModel:
    """Train one-vs-rest hinge-loss classifiers; fixed seed => identical model.

    ``tickets``/``labels`` override the default labeled subset (used by the
    cross-validation harness to train on folds and to pool rare labels).
    """
    if target_field not in TARGET_FIELDS:
        raise ValueError(f"target_field must be one of {TARGET_FIELDS}")
    config = config or TrainConfig()
    pipeline = pipeline or default_pipeline()

    if tickets is None or labels is None:
        tickets, labels = training_set(corpus, target_field, config, pipeline)

    distinct = sorted(set(labels))
    if len(distinct) < 2:
        raise TooFewLabels(f"need >= 2 distinct labels, got {len(distinct)}")
    if len(tickets) < 10:
        raise TooFewExamples(f"need >= 10 labeled tickets, got {len(tickets)}")

    vocab = corpus.vocabulary
    n_terms = len(vocab)
    n = len(tickets)

    # idf over the actual training documents, not the whole corpus
    df = np.zeros(n_terms, dtype=np.int64)
    for ticket in tickets:
        seen = {
            vocab[t.normalized]
            for t in ticket_tokens(ticket, pipeline)
            if t.normalized in vocab
        }
        for term_id in seen:
            df[term_id] += 1
    idf = np.where(df > 0, np.log(n / np.maximum(df, 1)), 0.0)

    feats = [_feature_vector(t, vocab, idf, pipeline) for t in tickets]
    label_index = {label: i for i, label in enumerate(distinct)}
    y_idx = np.array([label_index[l] for l in labels], dtype=np.int64)
    n_labels = len(distinct)

    # Pegasos-style updates with a lazy scale factor; the bias lives in an
    # extra always-on column so it shares the regularized schedule.
    w = np.zeros((n_labels, n_terms + 1), dtype=np.float64)
    bias_col = n_terms
    scale = 1.0
    lam = config.l2_lambda
    rng = np.random.default_rng(config.seed)
    step = 0
    label_range = np.arange(n_labels)

    for _ in range(config.epochs):
        for i in rng.permutation(n):
            ids, vals = feats[i]
            step += 1
            t = step + 1  # start at 2 so the decay never zeroes the weights
            eta = 1.0 / (lam * t)
            margins = scale * (w[:, ids] @ vals + w[:, bias_col])
            ysign = np.where(label_range == y_idx[i], 1.0, -1.0)
            violators = ysign * margins < 1.0
            scale *= 1.0 - 1.0 / t
            if violators.any():
                bump = (eta / scale) * ysign[violators]
                if ids.size:
                    w[np.ix_(violators, ids)] += bump[:, None] * vals[None, :]
                w[violators, bias_col] += bump

    w *= scale
    label_dates: dict[str, list[str]] = {l: [] for l in distinct}
    for ticket, label in zip(tickets, labels):
        if ticket.created_date is not None:
            label_dates[label].append(format_timestamp(ticket.created_date))
    for dates in label_dates.values():
        dates.sort()

    return ClassifierModel(
        target_field=target_field,
        labels=distinct,
        weights=w[:, :n_terms],
        bias=w[:, bias_col].copy(),
        vocabulary=dict(vocab),
        idf=idf,
        feedback_boost={},
        label_dates=label_dates,
        applied_event_ids=(),
        trained_at=utc_now(),
        config=config,
    )


def _scores(model: ClassifierModel, ids: np.ndarray, vals: np.ndarray) -> np.ndarray:
    if ids.size:
        scores = model.weights[:, ids] @ vals + model.bias
    else:
        scores = model.bias.copy()
    if model.feedback_boost:
        value_of = dict(zip(ids.tolist(), vals.tolist()))
        label_index = {label: i for i, label in enumerate(model.labels)}
        for (term_id, label), boost in model.feedback_boost.items():
            x = value_of.get(term_id)
            if x:
                scores[label_index[label]] += boost * x
    return scores


def predict(
    model: ClassifierModel,
    ticket: TicketRecord,
    recency_from: datetime | None = None,
    recency_to: datetime | None = None,
    pipeline: PipelineConfig | None = None,
    model_version: str = "",
) -> Recommendation:
    """Rank every trained label; a recency range demotes (never drops) labels
    with no training ticket inside it."""
    pipeline = pipeline or default_pipeline()
    if not ticket.summary.strip() and not ticket.description.strip():
        raise EmptyText("ticket has no text to classify")

    ids, vals = _feature_vector(ticket, model.vocabulary, model.idf, pipeline)
    scores = _scores(model, ids, vals)

    in_range: dict[str, bool] = {}
    if recency_from or recency_to:
        lo = format_timestamp(recency_from) if recency_from else ""
        hi = format_timestamp(recency_to) if recency_to else "9999"
        for label in model.labels:
            dates = model.label_dates.get(label, [])
            in_range[label] = any(lo <= d <= hi for d in dates)
    else:
        in_range = {label: True for label in model.labels}

    order = sorted(
        range(len(model.labels)),
        key=lambda i: (not in_range[model.labels[i]], -scores[i], model.labels[i]),
    )
    ranked = tuple((model.labels[i], float(scores[i])) for i in order)
    return Recommendation(
        target_field=model.target_field,
        ranked=ranked,
        model_version=model_version or model.fingerprint(),
        recency_from=recency_from,
        recency_to=recency_to,
    )


def apply_feedback(
    model: ClassifierModel,
    event: FeedbackEvent,
    corpus: Corpus,
    eta: float | None = None,
    pipeline: PipelineConfig | None = None,
) -> ClassifierModel:
    """New model with the event folded into the boost table.

    Accepted verdicts add eta * x_t to every active term's (term, label)
    boost; rejected subtract. Base weights stay untouched, and an event id
    can be applied exactly once (DuplicateEventId on replay).
    """
    pipeline = pipeline or default_pipeline()
    eta = model.config.feedback_eta if eta is None else eta

    if event.target_field != model.target_field:
        raise UnknownLabel(
            f"event targets {event.target_field!r} but model is for {model.target_field!r}"
        )
    if event.label not in model.labels:
        raise UnknownLabel(f"label {event.label!r} not among trained labels")
    if event.event_id in model.applied_event_ids:
        raise DuplicateEventId(f"event {event.event_id!r} already applied")
    if event.verdict not in (VERDICT_ACCEPTED, VERDICT_REJECTED):
        raise ValueError(f"verdict must be accepted or rejected, got {event.verdict!r}")
    ticket = corpus.ticket_by_id(event.ticket_id)
    if ticket is None:
        raise UnknownTicket(f"ticket {event.ticket_id!r} not in corpus")

    ids, vals = _feature_vector(ticket, model.vocabulary, model.idf, pipeline)
    sign = 1.0 if event.verdict == VERDICT_ACCEPTED else -1.0
    boosts = dict(model.feedback_boost)
    for term_id, x in zip(ids.tolist(), vals.tolist()):
        if x > 0:
            key = (term_id, event.label)
            boosts[key] = boosts.get(key, 0.0) + sign * eta * x

    return replace(
        model,
        feedback_boost=boosts,
        applied_event_ids=model.applied_event_ids + (event.event_id,),
    )


def predict_with_kernel(
    corpus: Corpus,
    target_field: str,
    ticket: TicketRecord,
    config: TrainConfig | None = None,
    pipeline: PipelineConfig | None = None,
) -> Recommendation:
    """Kernel-weighted k-NN vote: weight exp(-gamma * (1 - cosine)).

    Approximates a Gaussian-kernel classifier in tf-idf space; with gamma
    near zero it degrades to a majority vote among the k neighbors.
    """
    config = config or TrainConfig()
    pipeline = pipeline or default_pipeline()
    if config.kernel_gamma <= 0:
        raise BadBandwidth(f"gamma must be positive, got {config.kernel_gamma}")
    if not ticket.summary.strip() and not ticket.description.strip():
        raise EmptyText("ticket has no text to classify")

    tickets, labels = training_set(corpus, target_field, config, pipeline)
    if not tickets:
        raise TooFewExamples("no labeled tickets for kernel prediction")

    vocab = corpus.vocabulary
    n = len(tickets)
    df = np.zeros(len(vocab), dtype=np.int64)
    for t in tickets:
        seen = {vocab[tok.normalized] for tok in ticket_tokens(t, pipeline) if tok.normalized in vocab}
        for term_id in seen:
            df[term_id] += 1
    idf = np.where(df > 0, np.log(n / np.maximum(df, 1)), 0.0)

    q_ids, q_vals = _feature_vector(ticket, vocab, idf, pipeline)
    query = dict(zip(q_ids.tolist(), q_vals.tolist()))

    sims = []
    for ordinal, t in enumerate(tickets):
        ids, vals = _feature_vector(t, vocab, idf, pipeline)
        cos = sum(query.get(i, 0.0) * v for i, v in zip(ids.tolist(), vals.tolist()))
        sims.append((min(1.0, max(0.0, cos)), ordinal))

    k = max(1, min(config.kernel_k, n))
    sims.sort(key=lambda pair: (-pair[0], pair[1]))
    votes: dict[str, float] = {}
    for cos, ordinal in sims[:k]:
        weight = math.exp(-config.kernel_gamma * (1.0 - cos))
        votes[labels[ordinal]] = votes.get(labels[ordinal], 0.0) + weight

    ranked = tuple(sorted(votes.items(), key=lambda kv: (-kv[1], kv[0])))
    return Recommendation(
        target_field=target_field,
        ranked=ranked,
        model_version="kernel-knn",
    )
