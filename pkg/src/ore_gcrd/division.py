"""Right division without remainder: back-substitution and least squares.

Both routines return co-factors over a single common denominator; when
``h`` has a constant leading coefficient the denominator is 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approxgcd import approx_gcd
from .errors import AlgorithmError
from .ore import NEG_INF, DiffPoly, Degree, deg_vec, dnorm, mul_tensor, ore_mul, vec
from .polynomial import Poly, RatFun

# smallest admissible norm of the leading coefficient of a divisor
LEAD_TOL = 1e-8
# relative singular value below which the division system counts as rank deficient
RANK_TOL = 1e-12


@dataclass(frozen=True)
class QuotientResult:
    quotient: DiffPoly
    residual: float
    method: str
    den_degree: int = 0

    def to_json(self) -> dict:
        return {
            "quotient": self.quotient.to_json(),
            "residual": self.residual,
            "method": self.method,
            "den_degree": self.den_degree,
        }


def _check(f: DiffPoly, h: DiffPoly) -> tuple[int, int]:
    if f.is_zero() or h.is_zero():
        raise ValueError("operands must be nonzero")
    if f.has_den() or h.has_den():
        raise ValueError("clear denominators first")
    M, D = int(f.order), int(h.order)
    if D > M:
        raise ValueError("divisor has larger order than the dividend")
    return M, D


def cleared_residual(f: DiffPoly, q: DiffPoly, h: DiffPoly) -> float:
    """``||den(q) f - num(q) h|| / ||den(q)||``."""
    r = q.den * f - ore_mul(q.numerator(), h)
    return dnorm(r) / q.den.norm()


def cofactor_degrees(f_degrees: list[Degree], h_degrees: list[Degree]) -> list[int]:
    """Polynomial co-factor structure matched to ``f`` and ``h``.

    The highest t-degree part of an Ore product is the commutative product
    of the highest t-degree parts, so every slot of ``q`` is bounded by
    ``deg_t f - deg_t h``; the top slot is fixed exactly by
    ``lc_D(f) = q_top lc_D(h)``. Lower slots of ``f`` may lose degree to
    cancellation and are not used. Negative bounds are clipped to 0.
    """
    M, D = len(f_degrees) - 1, len(h_degrees) - 1
    if D > M:
        raise ValueError("divisor has larger order than the dividend")
    fmax = max((x for x in f_degrees if x != NEG_INF), default=NEG_INF)
    hmax = max((x for x in h_degrees if x != NEG_INF), default=NEG_INF)
    if fmax == NEG_INF or hmax == NEG_INF:
        raise ValueError("operands must be nonzero")
    out = [max(int(fmax - hmax), 0)] * (M - D + 1)
    if f_degrees[M] != NEG_INF and h_degrees[D] != NEG_INF:
        out[-1] = max(min(out[-1], int(f_degrees[M] - h_degrees[D])), 0)
    return out


def _reduce(den: Poly, nums: list[Poly], eps: float) -> tuple[Poly, list[Poly]]:
    """Cancel the approximate common factor of a denominator and numerators."""
    if den.degree <= 0:
        return den, nums
    ag = approx_gcd([den] + nums, eps)
    if ag.degree == 0:
        return den, nums
    return ag.cofactors[0], ag.cofactors[1:]


def lowest_terms(r: RatFun, eps: float = 1e-8) -> RatFun:
    """``r`` with the approximate GCD of numerator and denominator removed."""
    if r.num.is_zero():
        return RatFun(Poly(), Poly.one())
    den, (num,) = _reduce(r.den, [r.num], eps)
    return RatFun(num, den)


def right_divide_naive(f: DiffPoly, h: DiffPoly, eps: float = 1e-8) -> QuotientResult:
    """Quotient by back-substitution on the leading coefficient of ``h``.

    Stage ``j`` (from ``M - D`` down to 0) reads ``q_j`` off slot ``j + D``
    of the running remainder. Everything is kept over a power of
    ``lc_D(h)``, so the arithmetic stays polynomial.
    """
    M, D = _check(f, h)
    hD = h.lc
    if hD.norm() < LEAD_TOL:
        raise AlgorithmError("ill_conditioned", "leading coefficient ill-conditioned")
    K = M - D
    rem = list(f.coeffs) + [Poly()] * (M + 1 - len(f))
    nums: list[Poly] = [Poly()] * (K + 1)
    exps = [0] * (K + 1)
    m = 0  # remainder is rem / hD^m
    for j in range(K, -1, -1):
        # q_j = rem[j+D] / hD^(m+1)
        n = rem[j + D]
        P = ore_mul(DiffPoly.d(j), h)
        rem = [rem[k] * hD - n * P[k] for k in range(M + 1)]
        m += 1
        nums[j], exps[j] = n, m
    den = hD ** (K + 1)
    full = [n * hD ** (K + 1 - e) for n, e in zip(nums, exps)]
    den, full = _reduce(den, full, eps)
    q = DiffPoly(full, den)
    return QuotientResult(q, cleared_residual(f, q, h), "naive", int(q.den.degree))


def _division_system(f: DiffPoly, h: DiffPoly, e: int, num_degrees: list[Degree]) -> tuple[np.ndarray, np.ndarray]:
    """Blocks ``F`` and ``R`` with ``F c = vec(c f)``, ``R v = vec(v h)``."""
    dh = deg_vec(h)
    top = max(int(dg) for dg in num_degrees if dg != NEG_INF)
    out = [max(int(f.t_degree) + e, int(h.t_degree) + top)] * len(f)
    R = np.einsum("kpq,q->kp", mul_tensor(num_degrees, dh, out), vec(h))
    F = np.zeros((R.shape[0], e + 1))
    for p in range(e + 1):
        F[:, p] = vec(DiffPoly([Poly.monomial(p) * c for c in f.coeffs]), out)
    return F, R


def _solve(f: DiffPoly, h: DiffPoly, e: int, num_degrees: list[Degree]) -> tuple[Poly, DiffPoly, float, bool]:
    F, R = _division_system(f, h, e, num_degrees)
    sv = np.linalg.svd(R, compute_uv=False)
    deficient = bool(len(sv) < R.shape[1] or sv[-1] <= RANK_TOL * sv[0])
    if e == 0:
        x, *_ = np.linalg.lstsq(R, F[:, 0], rcond=None)
        c = np.array([1.0])
        r = float(np.linalg.norm(R @ x - F[:, 0]))
    else:
        A = np.hstack([F, -R])
        _, _, Vt = np.linalg.svd(A, full_matrices=True)
        z = Vt[-1]
        c, x = z[: e + 1], z[e + 1 :]
        cn = np.linalg.norm(c)
        if cn == 0.0:
            return Poly.one(), DiffPoly(), float("inf"), True
        r = float(np.linalg.norm(A @ z) / cn)
    offs = np.concatenate([[0], np.cumsum([0 if dg == NEG_INF else int(dg) + 1 for dg in num_degrees])])
    v = DiffPoly([Poly(x[offs[i] : offs[i + 1]]) for i in range(len(num_degrees))])
    return Poly(c), v, r, deficient


def right_divide_ls(
    f: DiffPoly,
    h: DiffPoly,
    den_degree: int | None = None,
    eps: float = 1e-8,
    num_degrees: list[Degree] | None = None,
) -> QuotientResult:
    """Least-squares quotient ``f* = v / v_{-1}`` with ``v_{-1} f ~ v h``.

    With ``den_degree = 0`` the co-factor is polynomial and ``||f - v h||``
    is minimised directly. Otherwise the homogeneous system is solved for
    the unit vector ``(v_{-1}, v)`` with the smallest residual. When
    ``den_degree`` is ``None`` the smallest denominator degree whose
    residual is within ten times the full-degree residual (or below
    ``eps * ||f||``) is found by binary search; the full degree is
    ``(M - D + 1) deg_t lc_D(h)``, which every exact denominator divides.

    A rank-deficient system whose residual exceeds ``1e-2 ||f||`` is an
    error; otherwise the residual is reported and judged by the caller.
    """
    M, D = _check(f, h)
    K = M - D
    d = int(max(f.t_degree, h.t_degree, 0))
    nf = dnorm(f)
    full = (K + 1) * int(h.lc.degree)

    def degs(e: int) -> list[Degree]:
        if num_degrees is not None and e == 0:
            return list(num_degrees)
        return [e + d] * (K + 1)

    cache: dict[int, tuple[Poly, DiffPoly, float, bool]] = {}

    def attempt(e: int) -> tuple[Poly, DiffPoly, float, bool]:
        if e not in cache:
            cache[e] = _solve(f, h, e, degs(e))
        return cache[e]

    if den_degree is not None:
        e = int(den_degree)
        if e < 0:
            raise ValueError("den_degree must be nonnegative")
    else:
        e = 0
        if full > 0:
            thr = max(10.0 * attempt(full)[2], eps * nf)
            if attempt(0)[2] > thr:
                lo, hi = 0, full
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if attempt(mid)[2] <= thr:
                        hi = mid
                    else:
                        lo = mid
                e = hi
    c, v, r, deficient = attempt(e)
    if deficient and not r <= 1e-2 * nf:
        raise AlgorithmError("no_division", "h does not approximately right-divide f", residual=r)
    den, nums = _reduce(c, list(v.coeffs) + [Poly()] * (K + 1 - len(v)), eps)
    q = DiffPoly(nums, den)
    return QuotientResult(q, cleared_residual(f, q, h), "least-squares", int(q.den.degree))
