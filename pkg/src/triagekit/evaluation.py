"""Evaluation harness: stratified cross-validation, log-replay accuracy,
precision@k over judged search results, and the per-label correlation study.

Absolute scores depend entirely on the data; what this module pins down is
the protocol: how folds are drawn, how metrics are averaged (macro, so
minority labels are not hidden), and how judgments are aggregated.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from triagekit.classify import TrainConfig, predict, train, training_set
from triagekit.errors import (
    ConstantSeries,
    HoldoutTooSmall,
    LengthMismatch,
    TooFewExamples,
)
from triagekit.model import Corpus
from triagekit.textpipe import PipelineConfig

OTHER_LABEL = "__other__"

JUDGMENT_RELEVANT = "relevant"
JUDGMENT_RELATED = "related"
JUDGMENT_IRRELEVANT = "irrelevant"


def stratified_folds(labels: list[str], folds: int, seed: int) -> np.ndarray:
    """Fold index per item: disjoint, exhaustive, sizes within 1.

    Items are grouped by label, shuffled, then dealt onto folds by one
    global cyclic cursor. The single cursor keeps overall fold sizes within
    one of each other while each label is still spread as evenly as its
    count allows (a label with >= folds items reaches every fold).
    """
    rng = np.random.default_rng(seed)
    assignment = np.zeros(len(labels), dtype=np.int64)
    cursor = 0
    groups: dict[str, list[int]] = defaultdict(list)
    for i, label in enumerate(labels):
        groups[label].append(i)
    for label in sorted(groups):
        indices = np.array(groups[label])
        rng.shuffle(indices)
        for i in indices:
            assignment[i] = cursor % folds
            cursor += 1
    return assignment


def pool_rare_labels(labels: list[str], folds: int) -> list[str]:
    """Labels with fewer instances than folds collapse into one bucket."""
    counts = Counter(labels)
    return [label if counts[label] >= folds else OTHER_LABEL for label in labels]


@dataclass
class FoldMetrics:
    fold: int
    precision: float
    recall: float
    f1: float
    accuracy: float
    test_size: int

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "test_size": self.test_size,
        }


@dataclass
class CvReport:
    target_field: str
    folds: list[FoldMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    label_count: int
    corpus_size: int
    seed: int
    averaging: str = "macro"

    def to_dict(self) -> dict:
        return {
            "target_field": self.target_field,
            "folds": [f.to_dict() for f in self.folds],
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "label_count": self.label_count,
            "corpus_size": self.corpus_size,
            "seed": self.seed,
            "averaging": self.averaging,
        }

    def to_table(self) -> str:
        from triagekit.reports import render_table

        rows = [
            [str(f.fold), f"{f.precision:.4f}", f"{f.recall:.4f}", f"{f.f1:.4f}",
             f"{f.accuracy:.4f}", str(f.test_size)]
            for f in self.folds
        ]
        rows.append(
            ["mean", f"{self.macro_precision:.4f}", f"{self.macro_recall:.4f}",
             f"{self.macro_f1:.4f}", "", ""]
        )
        return render_table(["fold", "precision", "recall", "f1", "accuracy", "size"], rows)


def _macro_prf(truth: list[str], predicted: list[str], labels: list[str]) -> tuple[float, float, float]:
    """Macro precision/recall/F1 over the given label set."""
    per_p, per_r, per_f = [], [], []
    for label in labels:
        tp = sum(1 for t, p in zip(truth, predicted) if t == label and p == label)
        fp = sum(1 for t, p in zip(truth, predicted) if t != label and p == label)
        fn = sum(1 for t, p in zip(truth, predicted) if t == label and p != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_p.append(precision)
        per_r.append(recall)
        per_f.append(f1)
    return (
        sum(per_p) / len(per_p),
        sum(per_r) / len(per_r),
        sum(per_f) / len(per_f),
    )


def cross_validate(
    corpus: Corpus,
    target_field: str,
    folds: int = 10,
    seed: int = 0,
    config: TrainConfig | None = None,
    pipeline: PipelineConfig | None = None,
) -> CvReport:
    """Stratified k-fold CV with macro-averaged precision/recall/F1."""
    config = config or TrainConfig(seed=seed)
    tickets, raw_labels = training_set(corpus, target_field, config, pipeline)
    if len(tickets) < folds:
        raise TooFewExamples(f"need >= {folds} labeled tickets, got {len(tickets)}")

    labels = pool_rare_labels(raw_labels, folds)
    assignment = stratified_folds(labels, folds, seed)
    label_set = sorted(set(labels))

    fold_metrics = []
    for fold in range(folds):
        train_idx = [i for i in range(len(tickets)) if assignment[i] != fold]
        test_idx = [i for i in range(len(tickets)) if assignment[i] == fold]
        model = train(
            corpus,
            target_field,
            config,
            tickets=[tickets[i] for i in train_idx],
            labels=[labels[i] for i in train_idx],
            pipeline=pipeline,
        )
        truth = [labels[i] for i in test_idx]
        predicted = [
            predict(model, tickets[i], pipeline=pipeline, model_version="cv").top()
            for i in test_idx
        ]
        p, r, f1 = _macro_prf(truth, predicted, model.labels)
        accuracy = sum(1 for t, pr in zip(truth, predicted) if t == pr) / len(truth)
        fold_metrics.append(FoldMetrics(fold, p, r, f1, accuracy, len(test_idx)))

    return CvReport(
        target_field=target_field,
        folds=fold_metrics,
        macro_precision=sum(f.precision for f in fold_metrics) / folds,
        macro_recall=sum(f.recall for f in fold_metrics) / folds,
        macro_f1=sum(f.f1 for f in fold_metrics) / folds,
        label_count=len(label_set),
        corpus_size=len(tickets),
        seed=seed,
    )


@dataclass
class LogAccuracyReport:
    target_field: str
    holdout_size: int
    accuracy: float
    top_k_accuracy: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "target_field": self.target_field,
            "holdout_size": self.holdout_size,
            "accuracy": self.accuracy,
            "top_k_accuracy": {str(k): v for k, v in sorted(self.top_k_accuracy.items())},
        }


def accuracy_against_log(
    corpus: Corpus,
    target_field: str,
    holdout: list[str],
    config: TrainConfig | None = None,
    pipeline: PipelineConfig | None = None,
    min_holdout: int = 30,
) -> LogAccuracyReport:
    """Train without the holdout tickets, score rank-1 agreement with the log.

    Top-k accuracy for k in {1, 3, 5} is reported alongside, since a logged
    assignee is one of several capable people.
    """
    if len(holdout) < min_holdout:
        raise HoldoutTooSmall(f"need >= {min_holdout} holdout tickets, got {len(holdout)}")
    model, _, pairs = _holdout_split(corpus, target_field, holdout, config, pipeline)

    hits = {1: 0, 3: 0, 5: 0}
    for ticket, true_label in pairs:
        ranked = [l for l, _ in predict(model, ticket, pipeline=pipeline, model_version="holdout").ranked]
        for k in hits:
            if true_label in ranked[:k]:
                hits[k] += 1
    n = len(pairs)
    return LogAccuracyReport(
        target_field=target_field,
        holdout_size=n,
        accuracy=hits[1] / n,
        top_k_accuracy={k: v / n for k, v in hits.items()},
    )


def _holdout_split(corpus, target_field, holdout, config, pipeline):
    config = config or TrainConfig()
    holdout_set = set(holdout)
    for ticket_id in holdout:
        if corpus.ticket_by_id(ticket_id) is None:
            raise HoldoutTooSmall(f"holdout ticket {ticket_id!r} not in corpus")
    tickets, labels = training_set(corpus, target_field, config, pipeline)
    train_pairs = [(t, l) for t, l in zip(tickets, labels) if t.id not in holdout_set]
    test_pairs = [(t, l) for t, l in zip(tickets, labels) if t.id in holdout_set]
    model = train(
        corpus,
        target_field,
        config,
        tickets=[t for t, _ in train_pairs],
        labels=[l for _, l in train_pairs],
        pipeline=pipeline,
    )
    return model, train_pairs, test_pairs


@dataclass
class PrecisionAtK:
    k: int
    per_query: list[tuple[int, int]]  # (relevant, relevant-or-related) in top k
    precision_relevant: float
    precision_relevant_or_related: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "per_query": [list(pair) for pair in self.per_query],
            "precision_relevant": self.precision_relevant,
            "precision_relevant_or_related": self.precision_relevant_or_related,
        }


def precision_at_k(judged: list[tuple[int, int]], k: int) -> PrecisionAtK:
    """Mean over queries of judged-positive-in-top-k divided by k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not judged:
        raise ValueError("need at least one judged query")
    for relevant, rel_or_related in judged:
        if not 0 <= relevant <= rel_or_related <= k:
            raise ValueError(
                f"judgment counts must satisfy 0 <= relevant <= relevant-or-related <= k, "
                f"got ({relevant}, {rel_or_related}) for k={k}"
            )
    n = len(judged)
    return PrecisionAtK(
        k=k,
        per_query=list(judged),
        precision_relevant=sum(r for r, _ in judged) / (n * k),
        precision_relevant_or_related=sum(rr for _, rr in judged) / (n * k),
    )


def load_judgment_lines(lines: list[str]) -> dict[str, list[str]]:
    """Parse "query-id,ticket-id,judgment" lines, order preserved per query."""
    out: dict[str, list[str]] = {}
    for raw in lines:
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected 'query-id,ticket-id,judgment', got {raw!r}")
        query_id, _, judgment = parts
        if judgment not in (JUDGMENT_RELEVANT, JUDGMENT_RELATED, JUDGMENT_IRRELEVANT):
            raise ValueError(f"unknown judgment {judgment!r} in line {raw!r}")
        out.setdefault(query_id, []).append(judgment)
    return out


def judgment_counts(per_query: dict[str, list[str]], k: int) -> list[tuple[int, int]]:
    """Per query: (relevant, relevant-or-related) among its first k judgments."""
    counts = []
    for query_id in sorted(per_query):
        top = per_query[query_id][:k]
        relevant = sum(1 for j in top if j == JUDGMENT_RELEVANT)
        related = sum(1 for j in top if j == JUDGMENT_RELATED)
        counts.append((relevant, relevant + related))
    return counts


def pearson(x: list[float], y: list[float]) -> float:
    """Product-moment correlation; constant series are an error, not NaN."""
    if len(x) != len(y):
        raise LengthMismatch(f"series lengths differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ConstantSeries("need at least 2 points to correlate")
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    var_x = sum(v * v for v in dx)
    var_y = sum(v * v for v in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ConstantSeries("correlation undefined for a constant series")
    r = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


@dataclass
class CorrelationStudy:
    target_field: str
    pairs: list[tuple[str, int, float]]  # (label, training count, holdout accuracy)
    r: float | None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "target_field": self.target_field,
            "pairs": [
                {"label": l, "training_count": c, "accuracy": a} for l, c, a in self.pairs
            ],
            "r": self.r,
            "error": self.error,
        }


def correlation_study(
    corpus: Corpus,
    target_field: str,
    holdout: list[str],
    config: TrainConfig | None = None,
    pipeline: PipelineConfig | None = None,
    min_holdout: int = 30,
) -> CorrelationStudy:
    """Does having worked more tickets make someone easier to predict?

    Pairs each label's training-ticket count with its holdout accuracy and
    correlates the two; a constant accuracy series surfaces as an error
    while the per-label table is still reported.
    """
    if len(holdout) < min_holdout:
        raise HoldoutTooSmall(f"need >= {min_holdout} holdout tickets, got {len(holdout)}")
    model, train_pairs, test_pairs = _holdout_split(corpus, target_field, holdout, config, pipeline)

    training_counts = Counter(label for _, label in train_pairs)
    by_label: dict[str, list[bool]] = defaultdict(list)
    for ticket, true_label in test_pairs:
        top = predict(model, ticket, pipeline=pipeline, model_version="study").top()
        by_label[true_label].append(top == true_label)

    pairs = []
    for label in sorted(by_label):
        if label not in training_counts:
            continue
        outcomes = by_label[label]
        pairs.append((label, training_counts[label], sum(outcomes) / len(outcomes)))

    r: float | None
    error = None
    try:
        r = pearson([float(c) for _, c, _ in pairs], [a for _, _, a in pairs])
    except (ConstantSeries, LengthMismatch) as exc:
        r = None
        error = exc.code
    return CorrelationStudy(target_field=target_field, pairs=pairs, r=r, error=error)
