"""Approximate GCD of several real univariate polynomials.

The degree is read off the numerical nullity of a generalized Sylvester
matrix; the factor itself is fitted by least squares and then polished by
Gauss-Newton on the factor and all cofactors jointly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polynomial import Poly, conv_matrix, ls_divide


MAX_PASSES = 50
STALL = 1e-10
# extra starting factors built from roots of the lowest-degree input
MAX_STARTS = 12


@dataclass(frozen=True)
class ApproxGcdResult:
    gcd: Poly
    degree: int
    cofactors: list[Poly] = field(default_factory=list)
    residual: float = 0.0


def _nonzero(polys: list[Poly]) -> list[Poly]:
    return [p for p in polys if not p.is_zero()]


def _order_lowest_first(polys: list[Poly]) -> tuple[list[Poly], list[int]]:
    order = sorted(range(len(polys)), key=lambda i: (polys[i].degree, i))
    return [polys[i] for i in order], order


def generalized_sylvester(polys: list[Poly], k: int = 0) -> np.ndarray:
    """Stacked blocks encoding ``u_1 p_i - u_i p_1 = 0`` for ``i >= 2``.

    ``p_1`` must be the first entry. Unknowns are ``u_1`` with degree at most
    ``deg p_1 - 1 - k`` followed by each ``u_i`` with degree at most
    ``deg p_i - 1 - k``; for ``k = 0`` the right nullity equals the degree of
    the exact GCD, and at ``k = g - 1`` the nullity is one.
    """
    p1, rest = polys[0], polys[1:]
    n1 = int(p1.degree)
    ku1 = n1 - 1 - k
    widths = [ku1 + 1] + [int(p.degree) - k for p in rest]
    if min(widths) <= 0:
        raise ValueError("degree offset too large for the given polynomials")
    offsets = np.concatenate([[0], np.cumsum(widths)])
    blocks = []
    for idx, p in enumerate(rest, start=1):
        A = conv_matrix(p, ku1)
        B = -conv_matrix(p1, widths[idx] - 1)
        row = np.zeros((A.shape[0], offsets[-1]))
        row[:, : widths[0]] = A
        row[:, offsets[idx] : offsets[idx + 1]] = B
        blocks.append(row)
    return np.vstack(blocks)


def approx_gcd_degree(polys: list[Poly], eps: float) -> int:
    """Numerical degree of the GCD of ``polys`` at tolerance ``eps``.

    Inputs are scaled to unit norm first; the degree is the count of
    singular values of the generalized Sylvester matrix below ``eps``.
    """
    ps = _nonzero(polys)
    if not ps:
        raise ValueError("approximate gcd of zero polynomials is undefined")
    if len(ps) == 1:
        return int(ps[0].degree)
    ps = [p / p.norm() for p in ps]
    ps, _ = _order_lowest_first(ps)
    if ps[0].degree <= 0:
        return 0
    S = generalized_sylvester(ps)
    sigma = np.linalg.svd(S, compute_uv=False)
    sigma = np.concatenate([sigma, np.zeros(S.shape[1] - len(sigma))])
    return int(min(np.count_nonzero(sigma < eps), ps[0].degree))


def approx_gcd(
    polys: list[Poly], eps: float = 1e-8, degree: int | None = None, passes: int | None = None
) -> ApproxGcdResult:
    """Approximate GCD with monic factor and least-squares cofactors.

    The factor and cofactors are polished jointly by Gauss-Newton,
    ``passes`` steps, or by default until a step gains less than
    ``STALL`` relative to the residual (at most ``MAX_PASSES``).

    Zero polynomials are carried through with zero cofactors. When the
    detected (or requested) degree is 0 the factor is 1 and the cofactors
    are the inputs.
    """
    polys = list(polys)
    nz_idx = [i for i, p in enumerate(polys) if not p.is_zero()]
    if not nz_idx:
        raise ValueError("approximate gcd of zero polynomials is undefined")
    nz = [polys[i] for i in nz_idx]
    k = approx_gcd_degree(nz, eps) if degree is None else int(degree)
    if k <= 0:
        return ApproxGcdResult(Poly.one(), 0, polys, 0.0)
    if len(nz) == 1:
        g = nz[0].monic()
        cof = [Poly() if p.is_zero() else Poly([nz[0].lc]) for p in polys]
        return ApproxGcdResult(g, k, cof, 0.0)

    scaled = [p / p.norm() for p in nz]
    ordered, order = _order_lowest_first(scaled)
    if k > ordered[0].degree:
        raise ValueError("requested gcd degree exceeds the smallest input degree")
    if k == ordered[0].degree:
        g = ordered[0].monic()
    else:
        # cofactor degrees n_i - k: one-dimensional nullspace
        S = generalized_sylvester(ordered, k - 1)
        _, _, Vt = np.linalg.svd(S)
        v = Vt[-1]
        widths = [int(p.degree) - k + 1 for p in ordered]
        offs = np.concatenate([[0], np.cumsum(widths)])
        us = [Poly(v[offs[i] : offs[i + 1]]) for i in range(len(ordered))]
        g = _fit_gcd(ordered, us, k)
    cof = [ls_divide(p, g, int(p.degree) - k)[0] for p in nz]
    n_pass = MAX_PASSES if passes is None else passes
    g, cof = _polish(nz, g, cof, k, n_pass)
    res = _residual(nz, cof, g)
    # the nullspace start can sit in the wrong basin when several near-common
    # factors of degree k exist; root subsets of one input cover the others
    for g0 in _root_starts(ordered[0], k):
        c0 = [ls_divide(p, g0, int(p.degree) - k)[0] for p in nz]
        g1, c1 = _polish(nz, g0, c0, k, n_pass)
        r1 = _residual(nz, c1, g1)
        if r1 < res:
            g, cof, res = g1, c1, r1
    s = g.lc
    g = g / s
    cof = [c * s for c in cof]
    res = _residual(nz, cof, g)
    full = [Poly() for _ in polys]
    for i, c in zip(nz_idx, cof):
        full[i] = c
    return ApproxGcdResult(g, k, full, res)


def _root_starts(p: Poly, k: int) -> list[Poly]:
    """Monic real degree-k factors of ``p`` from conjugation-closed root subsets."""
    if k >= p.degree:
        return []
    roots = np.roots(p.coeffs[::-1])
    units, used = [], np.zeros(len(roots), dtype=bool)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        used[i] = True
        if abs(r.imag) <= 1e-12 * max(1.0, abs(r)):
            units.append([r.real])
            continue
        j = min((j for j in range(len(roots)) if not used[j]), key=lambda j: abs(roots[j] - r.conjugate()), default=None)
        if j is None:
            units.append([r.real])
            continue
        used[j] = True
        units.append([r, r.conjugate()])
    out: list[Poly] = []

    def walk(start: int, chosen: list, size: int) -> None:
        if len(out) >= MAX_STARTS or size > k:
            return
        if size == k:
            out.append(Poly(np.real(np.poly(chosen))[::-1]))
            return
        for i in range(start, len(units)):
            walk(i + 1, chosen + units[i], size + len(units[i]))

    walk(0, [], 0)
    return out


def _polish(polys: list[Poly], g: Poly, cof: list[Poly], k: int, passes: int):
    """Gauss-Newton on ``sum |p_i - c_i g|^2`` with the leading coefficient of g fixed."""
    lead = g.lc
    sizes = [int(p.degree) + 1 for p in polys]
    widths = [n - k for n in sizes]
    rows = sum(sizes)

    def unpack(x):
        gv = np.append(x[:k], lead)
        offs = np.concatenate([[k], k + np.cumsum(widths)])
        return gv, [x[offs[i] : offs[i + 1]] for i in range(len(polys))]

    def resid(gv, cs):
        return np.concatenate([np.convolve(c, gv) - p.padded(n) for p, c, n in zip(polys, cs, sizes)])

    x = np.concatenate([g.padded(k + 1)[:k]] + [c.padded(w) for c, w in zip(cof, widths)])
    gv, cs = unpack(x)
    r = resid(gv, cs)
    res = np.linalg.norm(r)
    for _ in range(passes):
        J = np.zeros((rows, len(x)))
        r0, col = 0, k
        for c, n, w in zip(cs, sizes, widths):
            for j in range(k):
                J[r0 + j : r0 + j + w, j] = c
            for j in range(w):
                J[r0 + j : r0 + j + k + 1, col + j] = gv
            r0, col = r0 + n, col + w
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        t = 1.0
        while t > 1e-4:
            gn, cn = unpack(x + t * step)
            rn = resid(gn, cn)
            if np.linalg.norm(rn) < res:
                break
            t /= 2
        else:
            break
        gain = res - np.linalg.norm(rn)
        x, gv, cs, r, res = x + t * step, gn, cn, rn, np.linalg.norm(rn)
        if gain <= STALL * res or res == 0.0:
            break
    return Poly(gv), [Poly(c) for c in cs]


def _residual(polys: list[Poly], cofactors: list[Poly], g: Poly) -> float:
    return float(np.sqrt(sum((p - c * g).norm() ** 2 for p, c in zip(polys, cofactors))))


def _fit_gcd(polys: list[Poly], cofactors: list[Poly], k: int) -> Poly:
    rows, rhs = [], []
    for p, u in zip(polys, cofactors):
        if u.is_zero():
            continue
        C = conv_matrix(u, k)
        b = p.padded(max(C.shape[0], len(p.coeffs)))
        if len(b) > C.shape[0]:
            C = np.vstack([C, np.zeros((len(b) - C.shape[0], k + 1))])
        rows.append(C)
        rhs.append(b)
    G, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(rhs), rcond=None)
    g = Poly(G)
    if g.degree < k:
        raise ValueError("approximate gcd fit lost its leading coefficient")
    return g
