"""Numeric GCRD from the nullspace structure of the inflated Sylvester matrix,
and recovery of a nearby pair that has a nontrivial GCRD."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .approxgcd import approx_gcd, approx_gcd_degree
from .embed import SylvesterEmbed, embed
from .errors import AlgorithmError
from .ore import DiffPoly, deg_vec
from .polynomial import NEG_INF, Poly, gamma_inv, ls_divide
from .rank import RankReport, deflated_rank, rank_for_degree

# relative size below which a leading coefficient is considered lost
LC_TOL = 1e-6
# one degree reduction step may raise the subspace residual by at most this factor
STEP_RATIO = 3.0


@dataclass(frozen=True)
class GcrdResult:
    h: DiffPoly | None
    degree: int
    coprime: bool
    rank_report: RankReport | None
    residual: float = 0.0

    def to_json(self, spectrum: bool = False) -> dict:
        rep = None
        if self.rank_report is not None:
            rep = self.rank_report.to_json()
            if not spectrum:
                rep.pop("singular_values")
        return {
            "h": None if self.h is None else self.h.to_json(),
            "degree": self.degree,
            "coprime": self.coprime,
            "residual": self.residual,
            "rank_report": rep,
        }


@dataclass(frozen=True)
class NearbyResult:
    f: DiffPoly
    g: DiffPoly
    gcrd: GcrdResult
    rank_report: RankReport
    solver: "LeastSquaresGcrd | None" = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "g": self.g.to_json(), "gcrd": self.gcrd.to_json()}


def _coprime(rep: RankReport) -> GcrdResult:
    return GcrdResult(None, 0, True, rep, 0.0)


def _rank_and_degree(
    emb: SylvesterEmbed, epsilon_rank: float, degree: int | None
) -> tuple[RankReport, int, int]:
    """Rank report, GCRD degree and gap index for ``emb``."""
    rep = deflated_rank(emb, epsilon_rank)
    if degree is None:
        if rep.failed:
            raise AlgorithmError(
                "rank_gap", "no singular value gap found at the given epsilon_rank", rank_report=rep
            )
        if rep.full_rank:
            return rep, 0, rep.k
        return rep, int(rep.degree), int(rep.k)
    degree = int(degree)
    if not 0 <= degree <= min(emb.M, emb.N):
        raise ValueError("requested GCRD degree out of range")
    if degree == 0:
        return rep, 0, emb.size * emb.row_block
    return rep, degree, rank_for_degree(rep.singular_values, emb, degree)


def leading_degree_bound(f: DiffPoly, g: DiffPoly) -> int:
    """``deg_t`` of the leading coefficient of any common right factor is at most this."""
    return int(min(f.lc.degree, g.lc.degree))


# ---------------------------------------------------------------------------
# least-squares GCRD


def _smallest_left(X: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit vector ``y`` minimising ``||y @ X||`` and the attained value."""
    if X.shape[1] == 0:
        y = np.zeros(X.shape[0])
        y[-1] = 1.0
        return y, 0.0
    U, s, _ = np.linalg.svd(X, full_matrices=True)
    val = s[-1] if len(s) == X.shape[0] else 0.0
    return U[:, -1], float(val)


def _mask(D: int, cb: int, degrees: list[int]) -> np.ndarray:
    """Boolean selector of the h-coordinates allowed by per-slot degrees."""
    m = np.zeros((D + 1) * cb, dtype=bool)
    for i, dg in enumerate(degrees):
        if dg >= 0:
            m[i * cb : i * cb + dg + 1] = True
    return m


def _h_from(y: np.ndarray, mask: np.ndarray, D: int, cb: int) -> DiffPoly:
    full = np.zeros((D + 1) * cb)
    full[mask] = y
    return DiffPoly([Poly(full[i * cb : (i + 1) * cb]) for i in range(D + 1)])


class LeastSquaresGcrd:
    """Null-space data for least-squares GCRD solves on one input pair.

    Building it costs one SVD of ``S_hat``; :meth:`solve` can then be called
    for any degree structure of ``h``.
    """

    def __init__(
        self,
        f: DiffPoly,
        g: DiffPoly,
        epsilon_rank: float = 1e-9,
        degree: int | None = None,
        content_eps: float | None = None,
    ) -> None:
        self.f, self.g = f, g
        self.epsilon_rank = epsilon_rank
        self.content_eps = epsilon_rank if content_eps is None else content_eps
        emb = embed(f, g)
        self.rank_report, self.D, k = _rank_and_degree(emb, epsilon_rank, degree)
        self.cb = emb.col_block
        self.X = np.zeros((0, 0))
        self.content_bounds: list[int] = []  # uniform bounds visited by search_degrees
        self.lead_cap = leading_degree_bound(f, g)
        if self.D > 0:
            _, _, Vt = np.linalg.svd(emb.S_hat, full_matrices=True)
            self.X = Vt[k:, : (self.D + 1) * self.cb].T  # h-coordinates x nullspace basis

    @property
    def coprime(self) -> bool:
        return self.D == 0

    def fit(self, degrees: list[int]) -> float:
        """Smallest attainable ``||[h, 0] V_null||`` for unit ``h`` with these degrees."""
        return _smallest_left(self.X[_mask(self.D, self.cb, degrees)])[1]

    def search_degrees(self, path: list | None = None) -> list[int]:
        """Degree structure from content tightening and plateau reduction.

        The structures visited by the reduction are appended to ``path``.
        """
        D, cb, X = self.D, self.cb, self.X
        bound = cb - 1
        self.content_bounds = []
        for _ in range(4):
            mask = _mask(D, cb, [bound] * (D + 1))
            y, _ = _smallest_left(X[mask])
            h = _h_from(y, mask, D, cb)
            slots = [p for p in h.coeffs if not p.is_zero()]
            kc = approx_gcd_degree(slots, self.content_eps) if len(slots) > 1 else 0
            kc = min(kc, bound)
            if kc == 0:
                break
            bound -= kc
            self.content_bounds.append(bound)
        # the cap assumes polynomial co-factors; drop it if it loses lc_t lc_D h
        self.lead_cap = leading_degree_bound(self.f, self.g)
        degrees = self.uniform_degrees(bound)
        if not _lead_ok(X, D, cb, degrees):
            self.lead_cap = cb - 1
            degrees = self.uniform_degrees(bound)
        if degrees[D] < 0:
            raise AlgorithmError("ill_conditioned", "ill-conditioned leading coefficient")
        return reduce_degrees(X, D, cb, degrees, STEP_RATIO, 1e-2 * self.epsilon_rank, path)[0]

    def uniform_degrees(self, bound: int) -> list[int]:
        """Every slot at ``bound``, the leading one capped by ``lead_cap``."""
        degrees = [bound] * (self.D + 1)
        degrees[self.D] = min(bound, self.lead_cap)
        return degrees

    def solve(self, degrees: list[int]) -> GcrdResult:
        if self.coprime:
            return _coprime(self.rank_report)
        if len(degrees) != self.D + 1:
            raise ValueError(f"degrees must have length {self.D + 1}")
        degrees = [min(int(x), self.cb - 1) for x in degrees]
        return _finish(self.X, degrees, self.D, self.cb, self.rank_report)


def gcrd_via_ls(
    f: DiffPoly,
    g: DiffPoly,
    epsilon_rank: float = 1e-9,
    degree: int | None = None,
    content_eps: float | None = None,
    degrees: list[int] | None = None,
) -> GcrdResult:
    """GCRD ``h`` with ``[h, 0] = w S`` solved in the least-squares sense.

    The row space of ``S_hat`` is described by its orthogonal complement
    ``V_null``; ``h`` is the vector, supported on the first ``D + 1`` column
    blocks, closest to that row space. Its t-degrees are first bounded by
    ``mu + d`` and then tightened using the approximate content degree; the
    leading slot is capped by the degrees of the leading coefficients of
    ``f`` and ``g``, and slot degrees are then lowered while no single
    step worsens the fit by more than ``STEP_RATIO``. An explicit ``degrees`` list skips the search. The
    final solve fixes ``lc_t lc_D h = 1``.
    """
    prob = LeastSquaresGcrd(f, g, epsilon_rank, degree, content_eps)
    if prob.coprime:
        return _coprime(prob.rank_report)
    return prob.solve(prob.search_degrees() if degrees is None else list(degrees))


def reduce_degrees(
    X: np.ndarray, D: int, cb: int, degrees: list[int], ratio: float, floor: float, path: list | None = None
) -> tuple[list[int], float]:
    """Lower slot degrees while each step keeps the fit within ``ratio``.

    Candidate moves lower one slot, or every positive slot at once (which
    removes a common factor in t). The move with the smallest attained
    value is taken if it is at most ``max(ratio * current, floor)``.
    Returns the final degrees and the attained value; visited structures
    are appended to ``path`` when given.
    """
    degrees = list(degrees)
    cur = _smallest_left(X[_mask(D, cb, degrees)])[1]
    while True:
        if path is not None:
            path.append(list(degrees))
        moves = [degrees[:i] + [degrees[i] - 1] + degrees[i + 1 :] for i in range(D + 1) if degrees[i] > 0]
        if sum(1 for x in degrees if x > 0) > 1:
            moves.append([x - 1 if x > 0 else x for x in degrees])
        best = None
        for trial in moves:
            val = _smallest_left(X[_mask(D, cb, trial)])[1]
            if best is None or val < best[0]:
                best = (val, trial)
        if best is None or best[0] > max(ratio * cur, floor):
            return degrees, cur
        cur, degrees = best


def _lead_ok(X: np.ndarray, D: int, cb: int, degrees: list[int]) -> bool:
    mask = _mask(D, cb, degrees)
    y, _ = _smallest_left(X[mask])
    pos = int(np.count_nonzero(mask[: D * cb + degrees[D]]))
    return bool(abs(y[pos]) >= LC_TOL * np.linalg.norm(y))


def _finish(X: np.ndarray, degrees: list[int], D: int, cb: int, rep: RankReport) -> GcrdResult:
    """Solve with ``lc_t lc_D h = 1`` on the support given by ``degrees``."""
    mask = _mask(D, cb, degrees)
    y, _ = _smallest_left(X[mask])
    fixed = D * cb + degrees[D]
    pos = int(np.flatnonzero(np.flatnonzero(mask) == fixed)[0])
    if abs(y[pos]) < LC_TOL * np.linalg.norm(y):
        raise AlgorithmError("ill_conditioned", "ill-conditioned leading coefficient")
    Xm = X[mask]
    free = np.ones(len(Xm), dtype=bool)
    free[pos] = False
    sol, *_ = np.linalg.lstsq(Xm[free].T, -Xm[pos], rcond=None)
    yy = np.empty(len(Xm))
    yy[free] = sol
    yy[pos] = 1.0
    h = _h_from(yy, mask, D, cb)
    residual = float(np.linalg.norm(yy @ Xm) / np.linalg.norm(yy))
    return GcrdResult(h, D, False, rep, residual)


# ---------------------------------------------------------------------------
# nullspace-vector GCRD


def numeric_gcrd(
    f: DiffPoly,
    g: DiffPoly,
    epsilon_rank: float = 1e-9,
    degree: int | None = None,
    content_eps: float | None = None,
) -> GcrdResult:
    """GCRD read off a combination ``w S`` vanishing beyond slot ``D``.

    ``w`` ranges over the left nullspace of the columns of ``S_hat`` past
    block ``D``; among those the one with the largest block-``D`` component
    is taken, so the leading coefficient of ``h`` is as well conditioned as
    possible. Content is then removed numerically.
    """
    emb = embed(f, g)
    rep, D, _ = _rank_and_degree(emb, epsilon_rank, degree)
    if D == 0:
        return _coprime(rep)
    content_eps = epsilon_rank if content_eps is None else content_eps
    cb = emb.col_block
    S_hat = emb.S_hat
    tail = S_hat[:, (D + 1) * cb :]
    U, s, _ = np.linalg.svd(tail, full_matrices=True)
    r = int(np.count_nonzero(s > epsilon_rank))
    Z = U[:, r:]
    lead_block = S_hat[:, D * cb : (D + 1) * cb]
    Uz, sz, _ = np.linalg.svd(Z.T @ lead_block, full_matrices=False)
    w = Z @ Uz[:, 0]
    wS = w @ S_hat
    if sz[0] < LC_TOL * np.linalg.norm(wS):
        raise AlgorithmError("ill_conditioned", "ill-conditioned leading coefficient")
    off = float(np.linalg.norm(wS[(D + 1) * cb :]))
    h = DiffPoly([Poly(wS[i * cb : (i + 1) * cb]) for i in range(D + 1)])
    scale = np.sqrt(sum(p.norm() ** 2 for p in h.coeffs))
    h = h / scale
    slots = [p for p in h.coeffs if not p.is_zero()]
    res_c = 0.0
    if len(slots) > 1:
        ag = approx_gcd(slots, content_eps)
        if ag.degree > 0:
            h = DiffPoly([ls_divide(p, ag.gcd)[0] for p in h.coeffs])
            res_c = ag.residual
    # trim the leading slot to its numerical degree before normalising
    lead = h.lc
    nrm = np.sqrt(sum(p.norm() ** 2 for p in h.coeffs))
    c = np.array(lead.coeffs)
    top = len(c) - 1
    while top > 0 and abs(c[top]) < LC_TOL * nrm:
        top -= 1
    coeffs = list(h.coeffs)
    coeffs[D] = Poly(c[: top + 1])
    h = DiffPoly(coeffs)
    if abs(h.lc_lc) < LC_TOL * nrm:
        raise AlgorithmError("ill_conditioned", "ill-conditioned leading coefficient")
    h = h / h.lc_lc
    return GcrdResult(h, D, False, rep, off / scale + res_c)


# ---------------------------------------------------------------------------
# nearby pair


def deflated_perturbation(matrix: np.ndarray, emb: SylvesterEmbed) -> tuple[DiffPoly, DiffPoly]:
    """Recover ``(f~, g~)`` from a matrix with the shape of ``emb.S_hat``.

    ``f~_i`` is the Toeplitz back-projection of block ``(0, i)`` and
    ``g~_j`` that of block ``(N, j)``. Each coefficient is truncated to the
    t-degree of the corresponding coefficient of the original pair, so the
    degree vectors never grow.
    """
    M, N = emb.M, emb.N
    rb, cb = emb.row_block, emb.col_block
    expected = (emb.size * rb, emb.size * cb)
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != expected:
        raise ValueError(f"matrix has shape {matrix.shape}, expected {expected}")

    def take(row_block: int, count: int, ref: DiffPoly) -> DiffPoly:
        r0 = row_block * rb
        dv = deg_vec(ref)
        out = []
        for i in range(count + 1):
            p = gamma_inv(matrix[r0 : r0 + rb, i * cb : (i + 1) * cb])
            out.append(p.truncate(dv[i] if i < len(dv) else NEG_INF))
        return DiffPoly(out)

    f_t = take(0, M, emb.f) if N >= 1 else emb.f
    g_t = take(N, N, emb.g) if M >= 1 else emb.g
    return f_t, g_t


def nearby_with_gcrd(
    f: DiffPoly,
    g: DiffPoly,
    epsilon_rank: float = 1e-9,
    degree: int | None = None,
    content_eps: float | None = None,
) -> NearbyResult:
    """Nearby pair with a GCRD of the detected degree, and that GCRD.

    Every singular value of ``S_hat`` past the detected gap index ``k`` is
    set to zero (the values a degree-``D`` GCRD forces to vanish), the
    pair is read back from the low-rank matrix and the GCRD is computed by
    :func:`gcrd_via_ls` on it. The least-squares solver for the new pair
    is kept on the result so other degree structures can be tried cheaply.
    """
    emb = embed(f, g)
    rep, D, k = _rank_and_degree(emb, epsilon_rank, degree)
    if D == 0:
        return NearbyResult(f, g, _coprime(rep), rep)
    U, s, Vt = np.linalg.svd(emb.S_hat, full_matrices=False)
    s = s.copy()
    s[k:] = 0.0
    f_t, g_t = deflated_perturbation((U * s) @ Vt, emb)
    prob = LeastSquaresGcrd(f_t, g_t, epsilon_rank, degree=D, content_eps=content_eps)
    try:
        res = prob.solve(prob.search_degrees())
    except AlgorithmError as exc:
        # only a t-multiple of h reachable by the least-squares solve
        if exc.kind != "ill_conditioned":
            raise
        alt = numeric_gcrd(f_t, g_t, epsilon_rank, degree=D, content_eps=content_eps)
        return NearbyResult(f_t, g_t, GcrdResult(alt.h, alt.degree, alt.coprime, rep, alt.residual), rep, prob)
    return NearbyResult(f_t, g_t, GcrdResult(res.h, res.degree, False, rep, res.residual), rep, prob)
