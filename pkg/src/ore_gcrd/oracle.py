"""Exact rational twin of the numeric layer, used as ground truth.

Operators have coefficients in Q(t) (sympy rational function field
elements). Provides exact multiplication, right division with remainder,
the Euclidean GCRD and a generator of instances with a planted GCRD.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb
from typing import Iterable, Sequence

import numpy as np
from sympy import QQ, Rational
from sympy.polys.fields import field

from .ore import DiffPoly
from .polynomial import Poly

QT, T = field("t", QQ)

RationalLike = int | Fraction | str | Sequence[int]


def _q(x: RationalLike | float) -> object:
    """Exact rational in the ground domain from int / Fraction / 'p/q' / [p, q] / float."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError("a rational given as a pair must be [numerator, denominator]")
        x = Fraction(int(x[0]), int(x[1]))
    elif isinstance(x, str):
        x = Fraction(x)
    elif isinstance(x, float):
        x = Fraction(x)
    elif not isinstance(x, (int, Fraction)):
        x = Fraction(x)
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def qpoly(coeffs: Iterable[RationalLike | float]) -> object:
    """Element of Q(t) from ascending coefficients."""
    out = QT(0)
    for k, c in enumerate(coeffs):
        if c != 0:
            out += QT(_q(c)) * T**k
    return out


class QDiffPoly:
    """Operator ``sum_i c_i D^i`` with ``c_i`` in Q(t), right canonical form."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[object] = ()) -> None:
        cs = [QT(c) if not hasattr(c, "numer") else c for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @property
    def order(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1]

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else QT(0)

    def __add__(self, other: "QDiffPoly") -> "QDiffPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return QDiffPoly([self[i] + other[i] for i in range(n)])

    def __neg__(self) -> "QDiffPoly":
        return QDiffPoly([-c for c in self.coeffs])

    def __sub__(self, other: "QDiffPoly") -> "QDiffPoly":
        return self + (-other)

    def __mul__(self, other: "QDiffPoly") -> "QDiffPoly":
        return qdiff_mul(self, other)

    def scale_left(self, c) -> "QDiffPoly":
        """Left multiplication by an element of Q(t)."""
        return QDiffPoly([c * x for x in self.coeffs])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QDiffPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return "QDiffPoly(" + " + ".join(f"({c})*D^{i}" for i, c in enumerate(self.coeffs) if c != 0) + ")"

    @classmethod
    def d(cls, k: int = 1) -> "QDiffPoly":
        return cls([QT(0)] * k + [QT(1)])


def qdiff_mul(a: QDiffPoly, b: QDiffPoly) -> QDiffPoly:
    if a.is_zero() or b.is_zero():
        return QDiffPoly()
    M = len(a.coeffs) - 1
    out = [QT(0)] * (M + len(b.coeffs))
    for j, bj in enumerate(b.coeffs):
        deriv = bj
        for k in range(M + 1):
            if deriv == 0:
                break
            for i in range(k, M + 1):
                if a[i] != 0:
                    out[i - k + j] += comb(i, k) * a[i] * deriv
            deriv = deriv.diff(T)
    return QDiffPoly(out)


def exact_right_divrem(f: QDiffPoly, g: QDiffPoly) -> tuple[QDiffPoly, QDiffPoly]:
    """``f = q*g + r`` with ``deg_D r < deg_D g``."""
    if g.is_zero():
        raise ZeroDivisionError("right division by the zero operator")
    q = QDiffPoly()
    r = f
    while not r.is_zero() and r.order >= g.order:
        s = int(r.order - g.order)
        c = r.lc / g.lc
        term = QDiffPoly([QT(0)] * s + [c])
        q = q + term
        r = r - qdiff_mul(term, g)
    return q, r


def _cleared(f: QDiffPoly) -> tuple[list, object]:
    """Polynomial numerators over the monic common denominator of ``f``."""
    den = reduce(lambda x, y: x.lcm(y), [c.denom.monic() for c in f.coeffs if c != 0])
    nums = []
    for c in f.coeffs:
        p = c * den
        if p.denom.degree() > 0:
            raise ArithmeticError("denominator did not clear")
        nums.append(p.numer * (QQ(1) / p.denom.LC))
    return nums, den


def primitive_form(f: QDiffPoly) -> QDiffPoly:
    """Associate with polynomial coefficients, content 1 and ``lc_t lc_D = 1``."""
    if f.is_zero():
        return f
    nums, den = _cleared(f)
    cont = reduce(lambda x, y: x.gcd(y), [n for n in nums if n != 0])
    nums = [n.exquo(cont) if n != 0 else n for n in nums]
    lead = nums[-1].LC
    return QDiffPoly([QT(n) / QT(lead) for n in nums])


def exact_gcrd(f: QDiffPoly, g: QDiffPoly) -> QDiffPoly:
    """Monic (in D) greatest common right divisor via the Euclidean algorithm.

    Each remainder is replaced by its primitive associate to keep the
    rational coefficients small.
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("gcrd of two zero operators is undefined")
    a, b = (f, g) if f.order >= g.order else (g, f)
    while not b.is_zero():
        _, r = exact_right_divrem(a, b)
        a, b = b, (primitive_form(r) if not r.is_zero() else r)
    return a.scale_left(1 / a.lc)


# ---------------------------------------------------------------------------
# conversions


def from_diffpoly(f: DiffPoly) -> QDiffPoly:
    """Exact image of a floating point operator (every double is rational)."""
    den = qpoly([Fraction(float(c)) for c in f.den.coeffs])
    return QDiffPoly([qpoly([Fraction(float(c)) for c in p.coeffs]) / den for p in f.coeffs])


def from_rational_json(data: dict) -> QDiffPoly:
    """Operator from ``{"coeffs": [[r, ...], ...], "den": [r, ...]?}``.

    Each ``r`` is an integer, a ``"p/q"`` string or a ``[p, q]`` pair.
    """
    if not isinstance(data, dict) or not isinstance(data.get("coeffs"), list):
        raise ValueError('an exact operator must be a JSON object with a "coeffs" array')
    cs = []
    for i, row in enumerate(data["coeffs"]):
        if not isinstance(row, list):
            raise ValueError(f"coeffs[{i}] must be an array")
        try:
            cs.append(qpoly([_check_rational(x) for x in row]))
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise ValueError(f"coeffs[{i}]: {exc}") from None
    den = QT(1)
    if data.get("den") is not None:
        den = qpoly([_check_rational(x) for x in data["den"]])
        if den == 0:
            raise ValueError("den must be nonzero")
    return QDiffPoly([c / den for c in cs])


def _check_rational(x: object) -> RationalLike:
    if isinstance(x, bool) or isinstance(x, float):
        raise ValueError(f"expected an exact rational, got {x!r}")
    if isinstance(x, (int, str)):
        return x
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        return x
    raise ValueError(f"expected an exact rational, got {x!r}")


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def to_rational_json(f: QDiffPoly) -> dict:
    """Common-denominator JSON with ``[numerator, denominator]`` pairs."""
    if f.is_zero():
        return {"coeffs": []}
    nums, den = _cleared(f)

    def arr(p) -> list:
        return [[x.numerator, x.denominator] for x in _ascending(p)]

    out = {"coeffs": [arr(n) for n in nums]}
    dcs = _ascending(den)
    if not (len(dcs) == 1 and dcs[0] == 1):
        out["den"] = [[x.numerator, x.denominator] for x in dcs]
    return out


def _ascending(p) -> list[Fraction]:
    """Ascending rational coefficients of a sympy polynomial ring element."""
    if p == 0:
        return []
    deg = p.degree()
    cs = [Fraction(0)] * (deg + 1)
    for (k,), c in p.terms():
        cs[k] = _frac(c)
    return cs


def to_diffpoly(f: QDiffPoly) -> DiffPoly:
    """Floating point copy over the common denominator."""
    if f.is_zero():
        return DiffPoly()
    nums, den = _cleared(f)
    return DiffPoly(
        [Poly([float(x) for x in _ascending(n)]) for n in nums],
        Poly([float(x) for x in _ascending(den)]),
    )


# ---------------------------------------------------------------------------
# planted instances


@dataclass(frozen=True)
class PlantSpec:
    """Degrees of a planted instance.

    ``M, N`` are the D-degrees of f and g, ``D`` that of the planted GCRD,
    ``d`` the t-degree of f and g and ``d_h`` that of the GCRD.
    """

    M: int
    N: int
    D: int
    d: int
    d_h: int | None = None

    def __post_init__(self) -> None:
        if self.d_h is None:
            object.__setattr__(self, "d_h", (self.d + 1) // 2 if self.D > 0 else 0)
        if not (0 <= self.D <= min(self.M, self.N)):
            raise ValueError("planted degree must satisfy 0 <= D <= min(M, N)")
        if self.M < 1 and self.N < 1:
            raise ValueError("at least one input must have positive D-degree")
        if not (0 <= self.d_h <= self.d):
            raise ValueError("t-degree of the GCRD must lie in [0, d]")


@dataclass(frozen=True)
class PlantedInstance:
    spec: PlantSpec
    f: QDiffPoly
    g: QDiffPoly
    h: QDiffPoly
    a: QDiffPoly
    b: QDiffPoly
    f_float: DiffPoly
    g_float: DiffPoly
    h_float: DiffPoly


def _random_int_op(rng: np.random.Generator, order: int, tdeg: int, bound: int = 5) -> list[list[int]]:
    rows = rng.integers(-bound, bound + 1, size=(order + 1, tdeg + 1)).tolist()
    if rows[-1][-1] == 0:
        rows[-1][-1] = int(rng.choice([v for v in range(-bound, bound + 1) if v != 0]))
    return rows


def _qop(rows: list[list[int]]) -> QDiffPoly:
    return QDiffPoly([qpoly(r) for r in rows])


def _is_primitive(rows: list[list[int]]) -> bool:
    nums = [qpoly(r).numer for r in rows if any(r)]
    return reduce(lambda x, y: x.gcd(y), nums).degree() <= 0


def plant_instance(spec: PlantSpec | Sequence[int], seed: int | Sequence[int] | np.random.Generator = 0, attempts: int = 10) -> PlantedInstance:
    """Random ``f = a*h``, ``g = b*h`` with ``gcrd(a, b) = 1`` verified exactly.

    Cofactors and GCRD have small integer coefficients; the GCRD is
    primitive with nonzero ``lc_t lc_D``. The floating point copies of f and
    g are exact; that of h is scaled to ``lc_t lc_D h = 1``.
    """
    if not isinstance(spec, PlantSpec):
        spec = PlantSpec(*spec)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    d_c = spec.d - spec.d_h
    for _ in range(attempts):
        if spec.D == 0:
            h_rows = [[1]]
        else:
            h_rows = _random_int_op(rng, spec.D, spec.d_h)
            if not _is_primitive(h_rows):
                continue
        a_rows = _random_int_op(rng, spec.M - spec.D, d_c)
        b_rows = _random_int_op(rng, spec.N - spec.D, d_c)
        a, b, h = _qop(a_rows), _qop(b_rows), _qop(h_rows)
        if a.order > 0 and b.order > 0 and exact_gcrd(a, b).order != 0:
            continue
        f, g = qdiff_mul(a, h), qdiff_mul(b, h)
        hp = primitive_form(h)
        if exact_gcrd(f, g) != hp.scale_left(1 / hp.lc):
            continue
        h_float = to_diffpoly(hp)
        h_float = h_float / h_float.lc_lc
        return PlantedInstance(spec, f, g, hp, a, b, to_diffpoly(f), to_diffpoly(g), h_float)
    raise RuntimeError(f"could not plant a coprime-cofactor instance in {attempts} attempts")


def as_rational(x: float | Fraction) -> Rational:
    """sympy Rational of an exact float value (helper for tests)."""
    fr = Fraction(x)
    return Rational(fr.numerator, fr.denominator)
