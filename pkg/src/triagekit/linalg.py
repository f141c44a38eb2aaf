"""Truncated SVD by seeded orthogonal iteration on the smaller Gram matrix.

Used for latent-semantic centrality over phrase-document matrices. The
iteration runs on an oversampled subspace and finishes with a Rayleigh-Ritz
step, which keeps singular vectors orthonormal and values accurate even
when the spectrum has small gaps at the truncation rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from triagekit.errors import RankTooLarge

_OVERSAMPLE = 8


@dataclass
class TruncatedSvd:
    u: np.ndarray   # m x r, orthonormal columns
    s: np.ndarray   # r, non-negative, non-increasing
    vt: np.ndarray  # r x n, orthonormal rows

    @property
    def rank(self) -> int:
        return self.s.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.vt


def truncated_svd(
    matrix: np.ndarray,
    rank: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-12,
) -> TruncatedSvd:
    """Top-`rank` singular triplets of `matrix`, deterministic per seed.

    Raises RankTooLarge when the matrix is empty or rank exceeds min(m, n).
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise RankTooLarge(f"matrix of shape {a.shape} cannot be decomposed")
    m, n = a.shape
    d = min(m, n)
    if not 1 <= rank <= d:
        raise RankTooLarge(f"rank {rank} outside [1, {d}] for shape {a.shape}")

    # Gram matrix on the smaller side; its eigenvectors are U (m<=n) or V.
    small_is_rows = m <= n
    gram = a @ a.T if small_is_rows else a.T @ a

    width = min(d, rank + _OVERSAMPLE)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, width)))

    prev = np.zeros(width)
    for _ in range(max_iter):
        z = gram @ q
        q, r = np.linalg.qr(z)
        estimates = np.abs(np.diag(r))
        scale = estimates.max() if estimates.max() > 0 else 1.0
        if np.max(np.abs(estimates - prev)) <= tol * scale:
            break
        prev = estimates

    # Rayleigh-Ritz: exact eigenpairs within the converged subspace.
    t = q.T @ gram @ q
    t = (t + t.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(t)
    order = np.argsort(eigvals)[::-1][:rank]
    lam = np.clip(eigvals[order], 0.0, None)
    basis = q @ eigvecs[:, order]

    s = np.sqrt(lam)
    if small_is_rows:
        u = basis
        vt = _derive_factor(a.T, u, s).T
    else:
        v = basis
        u = _derive_factor(a, v, s)
        vt = v.T

    u, vt = _fix_signs(u, vt)
    return TruncatedSvd(u=u, s=s, vt=vt)


def _derive_factor(a: np.ndarray, basis: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Columns a @ basis / sigma; zero singular values yield zero columns."""
    raw = a @ basis
    out = np.zeros_like(raw)
    positive = s > s.max() * 1e-13 if s.size and s.max() > 0 else np.zeros_like(s, dtype=bool)
    out[:, positive] = raw[:, positive] / s[positive]
    return out


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic sign convention: largest-|u| entry per column positive."""
    for j in range(u.shape[1]):
        col = u[:, j]
        if col.size == 0:
            continue
        pivot = np.argmax(np.abs(col))
        if col[pivot] < 0:
            u[:, j] = -col
            vt[j, :] = -vt[j, :]
    return u, vt
