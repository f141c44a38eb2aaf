"""Collapsed Gibbs sampling for latent Dirichlet allocation over phrase ids.

Documents arrive as sequences of integer term ids (phrase occurrences).
Distributions are averaged over the post-burn-in sweeps, so the returned
topic-term and document-topic rows are smoother than a single final state
while still summing to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from triagekit.errors import BadHyperparameters


@dataclass
class LdaResult:
    topic_term: np.ndarray  # K x V, rows sum to 1
    doc_topic: np.ndarray   # D x K, rows sum to 1
    assignments: list[np.ndarray]
    topic_term_counts: np.ndarray  # K x V integer counts of the final state
    n_topics: int
    alpha: float
    beta: float
    iterations: int
    burn_in: int
    seed: int

    def term_score(self, term_id: int) -> float:
        """max over topics of P(term | topic)."""
        return float(self.topic_term[:, term_id].max())


def collapsed_gibbs(
    documents: list[list[int]],
    vocab_size: int,
    n_topics: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    burn_in: int = 200,
    seed: int = 0,
) -> LdaResult:
    """Single-chain collapsed Gibbs; identical seeds give identical results."""
    if alpha is None:
        alpha = 50.0 / n_topics if n_topics else 0.0
    if n_topics < 2:
        raise BadHyperparameters(f"need at least 2 topics, got {n_topics}")
    if alpha <= 0 or beta <= 0:
        raise BadHyperparameters(f"alpha and beta must be positive, got {alpha}, {beta}")
    if iterations < 1 or burn_in < 0 or burn_in >= iterations:
        raise BadHyperparameters(
            f"need 0 <= burn_in < iterations, got burn_in={burn_in}, iterations={iterations}"
        )
    if vocab_size < 1:
        raise BadHyperparameters("empty vocabulary")

    rng = np.random.default_rng(seed)
    n_docs = len(documents)
    k = n_topics

    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, vocab_size), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    assignments = [np.zeros(len(doc), dtype=np.int64) for doc in documents]

    for d, doc in enumerate(documents):
        for i, w in enumerate(doc):
            z = int(rng.integers(k))
            assignments[d][i] = z
            n_dk[d, z] += 1
            n_kw[z, w] += 1
            n_k[z] += 1

    beta_sum = beta * vocab_size
    phi_acc = np.zeros((k, vocab_size))
    theta_acc = np.zeros((n_docs, k))
    samples = 0

    for sweep in range(iterations):
        for d, doc in enumerate(documents):
            zs = assignments[d]
            for i, w in enumerate(doc):
                z = zs[i]
                n_dk[d, z] -= 1
                n_kw[z, w] -= 1
                n_k[z] -= 1

                weights = (n_dk[d] + alpha) * (n_kw[:, w] + beta) / (n_k + beta_sum)
                total = weights.cumsum()
                z = int(np.searchsorted(total, rng.random() * total[-1], side="right"))
                z = min(z, k - 1)

                zs[i] = z
                n_dk[d, z] += 1
                n_kw[z, w] += 1
                n_k[z] += 1

        if sweep >= burn_in:
            phi_acc += (n_kw + beta) / (n_k + beta_sum)[:, None]
            doc_totals = n_dk.sum(axis=1, keepdims=True)
            theta_acc += (n_dk + alpha) / (doc_totals + k * alpha)
            samples += 1

    return LdaResult(
        topic_term=phi_acc / samples,
        doc_topic=theta_acc / samples,
        assignments=assignments,
        topic_term_counts=n_kw,
        n_topics=k,
        alpha=alpha,
        beta=beta,
        iterations=iterations,
        burn_in=burn_in,
        seed=seed,
    )
