"""Differential convolution matrices and the (inflated) differential Sylvester matrix."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ore import DiffPoly, ore_mul, to_left_coeffs
from .polynomial import Poly, gamma

PolyMatrix = list[list[Poly]]


def _check_operator(h: DiffPoly, name: str = "h") -> None:
    if h.is_zero():
        raise ValueError(f"{name} must be a nonzero operator")
    if h.has_den():
        raise ValueError("clear denominators first")


def rconv(h: DiffPoly, K: int) -> PolyMatrix:
    """Rows are the coefficient rows of ``D^i * h`` for ``i = 0..K``.

    A row vector of the coefficients of ``q`` (``deg_D q <= K``) times this
    matrix gives the coefficients of ``q*h``.
    """
    _check_operator(h)
    D = int(h.order)
    rows = []
    cur = h
    for i in range(K + 1):
        rows.append([cur[j] for j in range(K + D + 1)])
        cur = ore_mul(DiffPoly.d(), cur)
    return rows


def lconv(h: DiffPoly, K: int) -> PolyMatrix:
    """Rows are the left canonical coefficients of ``h * D^i`` for ``i = 0..K``.

    With ``q = sum_b D^b c_b`` written in left canonical form, the left
    canonical coefficients of ``h*q`` are ``lconv(h, K)^T @ (c_0, ..., c_K)``.
    """
    _check_operator(h)
    D = int(h.order)
    rows = []
    cur = h
    for i in range(K + 1):
        left = to_left_coeffs(cur)
        rows.append([left[j] if j < len(left) else Poly() for j in range(K + D + 1)])
        cur = ore_mul(cur, DiffPoly.d())
    return rows


def poly_matrix_to_array(P: PolyMatrix, d: int | None = None) -> np.ndarray:
    """Dense ``(rows, cols, d+1)`` array of t-coefficients."""
    if d is None:
        d = max((int(p.degree) for row in P for p in row if not p.is_zero()), default=0)
    out = np.zeros((len(P), len(P[0]) if P else 0, d + 1))
    for i, row in enumerate(P):
        for j, p in enumerate(row):
            out[i, j, : len(p.coeffs)] = p.coeffs
    return out


@dataclass(frozen=True)
class SylvesterEmbed:
    """Differential Sylvester matrix of ``(f, g)`` and its real inflation.

    ``S`` is stored as an ``(M+N, M+N, d+1)`` array of t-coefficients;
    ``S_hat`` is ``None`` until :func:`inflate` has run.
    """

    f: DiffPoly
    g: DiffPoly
    M: int
    N: int
    d: int
    mu: int
    S: np.ndarray
    S_hat: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.M + self.N

    @property
    def row_block(self) -> int:
        return self.mu + 1

    @property
    def col_block(self) -> int:
        return self.mu + self.d + 1

    @property
    def trivial_zeros(self) -> int:
        """Number of structurally zero singular values of ``S_hat``."""
        return self.size * self.d

    def entry(self, i: int, j: int) -> Poly:
        return Poly(self.S[i, j])

    def poly_matrix(self) -> PolyMatrix:
        n = self.size
        return [[self.entry(i, j) for j in range(n)] for i in range(n)]


def sylvester(f: DiffPoly, g: DiffPoly) -> SylvesterEmbed:
    """``S = [rconv(f, N-1); rconv(g, M-1)]`` with ``mu = 2(M+N)d``."""
    _check_operator(f, "f")
    _check_operator(g, "g")
    M, N = int(f.order), int(g.order)
    if M < 1 and N < 1:
        raise ValueError("at least one input must have positive degree in D")
    d = int(max(f.t_degree, g.t_degree, 0))
    rows: PolyMatrix = []
    if N >= 1:
        rows += rconv(f, N - 1)
    if M >= 1:
        rows += rconv(g, M - 1)
    S = poly_matrix_to_array(rows, d)
    return SylvesterEmbed(f, g, M, N, d, 2 * (M + N) * d, S)


def inflate(emb: SylvesterEmbed, mu: int | None = None) -> SylvesterEmbed:
    """Replace each entry ``S[i, j]`` by the real block ``gamma(S[i, j], d, mu)``."""
    mu = emb.mu if mu is None else int(mu)
    n, d = emb.size, emb.d
    rb, cb = mu + 1, mu + d + 1
    S_hat = np.zeros((n * rb, n * cb))
    for i in range(n):
        for j in range(n):
            p = emb.entry(i, j)
            if not p.is_zero():
                S_hat[i * rb : (i + 1) * rb, j * cb : (j + 1) * cb] = gamma(p, d, mu)
    return replace(emb, mu=mu, S_hat=S_hat)


def embed(f: DiffPoly, g: DiffPoly, mu: int | None = None) -> SylvesterEmbed:
    """Sylvester matrix together with its inflation."""
    return inflate(sylvester(f, g), mu)
