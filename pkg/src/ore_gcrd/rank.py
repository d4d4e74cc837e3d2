"""Numeric rank of the differential Sylvester matrix from the spectrum of its inflation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embed import SylvesterEmbed


def svd(A: np.ndarray, full_matrices: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``A = U @ diag(s) @ Vt`` with descending singular values.

    Returns ``(U, s, V)`` where ``V`` has the right singular vectors as
    columns.
    """
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    U, s, Vt = np.linalg.svd(A, full_matrices=full_matrices)
    return U, s, Vt.T


def padded_spectrum(S_hat: np.ndarray) -> np.ndarray:
    """Singular values padded with zeros to the column count of ``S_hat``."""
    s = np.linalg.svd(S_hat, compute_uv=False)
    return np.concatenate([s, np.zeros(S_hat.shape[1] - len(s))])


@dataclass(frozen=True)
class RankReport:
    singular_values: np.ndarray
    epsilon_rank: float
    size: int  # M + N
    col_block: int  # mu + d + 1
    threshold: float  # lower bound required of sigma_k
    k: int | None = None
    rho: int | None = None
    full_rank: bool = False
    failed: bool = False

    @property
    def degree(self) -> int | None:
        """Implied GCRD degree ``M + N - rho``."""
        return None if self.rho is None else self.size - self.rho

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rho": self.rho,
            "gcrd_degree": self.degree,
            "full_rank": self.full_rank,
            "failed": self.failed,
            "epsilon_rank": self.epsilon_rank,
            "threshold": self.threshold,
            "singular_values": [float(x) for x in self.singular_values],
        }


def deflated_rank(emb: SylvesterEmbed, epsilon_rank: float = 1e-9, spectrum: np.ndarray | None = None) -> RankReport:
    """Numeric rank ``rho`` of ``S`` from the singular values of ``S_hat``.

    ``k`` is the largest index with ``sigma_k`` above the scaled threshold
    and ``sigma_{k+1}`` below ``epsilon_rank``; ``rho = ceil(k / (mu+d+1))``.
    When every non-trivial singular value exceeds ``epsilon_rank`` the
    matrix has full rank. A spectrum with no such gap is reported as failed.
    """
    if emb.S_hat is None:
        raise ValueError("embedding is not inflated")
    if not epsilon_rank > 0:
        raise ValueError("epsilon_rank must be positive")
    sigma = padded_spectrum(emb.S_hat) if spectrum is None else np.asarray(spectrum, dtype=float)
    n = emb.size
    cb, rb = emb.col_block, emb.row_block
    upper = epsilon_rank * scale_factor(n, emb.mu, emb.d)
    base = dict(singular_values=sigma, epsilon_rank=float(epsilon_rank), size=n, col_block=cb, threshold=upper)
    nontrivial = n * rb
    if sigma[nontrivial - 1] > epsilon_rank:
        return RankReport(**base, k=nontrivial, rho=n, full_rank=True)
    # 1-based k with sigma_k > upper and sigma_{k+1} < eps
    ok = np.flatnonzero((sigma[:-1] > upper) & (sigma[1:] < epsilon_rank))
    if ok.size == 0:
        return RankReport(**base, failed=True)
    k = int(ok[-1]) + 1
    return RankReport(**base, k=k, rho=math.ceil(k / cb))


def scale_factor(size: int, mu: int, d: int) -> float:
    """``sqrt(size * (2 mu + d + 2)) / (mu + d + 1)``."""
    return math.sqrt(size * (2 * mu + d + 2)) / (mu + d + 1)


def rank_for_degree(sigma: np.ndarray, emb: SylvesterEmbed, degree: int) -> int:
    """Gap index consistent with a prescribed GCRD degree.

    Picks the largest relative drop ``sigma_k / sigma_{k+1}`` among the
    indices whose ceiling quotient gives ``rho = M + N - degree``.
    """
    cb = emb.col_block
    rho = emb.size - degree
    lo, hi = (rho - 1) * cb + 1, rho * cb
    lo = max(lo, 1)
    hi = min(hi, len(sigma) - 1)
    idx = np.arange(lo, hi + 1)
    tiny = np.finfo(float).tiny
    ratios = np.log(np.maximum(sigma[idx - 1], tiny)) - np.log(np.maximum(sigma[idx], tiny))
    return int(idx[int(np.argmax(ratios))])
