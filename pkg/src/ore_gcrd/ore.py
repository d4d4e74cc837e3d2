"""Differential operators in R(t)[D] with the commutation rule D*y = y*D + y'.

A :class:`DiffPoly` stores its coefficients in right canonical form
(coefficients to the left of the powers of D), as dense polynomials in t
over a single common denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .approxgcd import approx_gcd
from .polynomial import NEG_INF, Number, Poly, ls_divide

Degree = int | float  # an int, or NEG_INF for a zero coefficient
DegreeVector = tuple[Degree, ...]


class DiffPoly:
    __slots__ = ("_coeffs", "_den")

    def __init__(self, coeffs: Iterable[Poly | Sequence[Number]] = (), den: Poly | Sequence[Number] | None = None):
        polys = [c if isinstance(c, Poly) else Poly(c) for c in coeffs]
        while polys and polys[-1].is_zero():
            polys.pop()
        if den is None:
            den = Poly.one()
        elif not isinstance(den, Poly):
            den = Poly(den)
        if den.is_zero():
            raise ZeroDivisionError("differential polynomial with zero denominator")
        s = den.lc
        if s != 1.0:
            polys = [p / s for p in polys]
            den = den / s
        self._coeffs: tuple[Poly, ...] = tuple(polys)
        self._den: Poly = den

    # constructors ---------------------------------------------------------
    @classmethod
    def from_poly(cls, p: Poly | Sequence[Number]) -> "DiffPoly":
        return cls([p])

    @classmethod
    def d(cls, k: int = 1) -> "DiffPoly":
        """The operator ``D**k``."""
        return cls([Poly()] * k + [Poly.one()])

    @classmethod
    def t(cls) -> "DiffPoly":
        return cls([Poly([0.0, 1.0])])

    # properties -------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Poly, ...]:
        return self._coeffs

    @property
    def den(self) -> Poly:
        return self._den

    @property
    def order(self) -> Degree:
        """Degree in D (``-inf`` for the zero operator)."""
        return len(self._coeffs) - 1 if self._coeffs else NEG_INF

    @property
    def t_degree(self) -> Degree:
        """Largest t-degree among the numerator coefficients."""
        return max((p.degree for p in self._coeffs), default=NEG_INF)

    def has_den(self) -> bool:
        return self._den.degree > 0

    def is_zero(self) -> bool:
        return not self._coeffs

    def __getitem__(self, i: int) -> Poly:
        return self._coeffs[i] if 0 <= i < len(self._coeffs) else Poly()

    def __len__(self) -> int:
        return len(self._coeffs)

    @property
    def lc(self) -> Poly:
        """Leading coefficient in D (numerator)."""
        if not self._coeffs:
            raise ValueError("zero operator has no leading coefficient")
        return self._coeffs[-1]

    @property
    def lc_lc(self) -> float:
        """``lc_t(lc_D(f))``: the leading t-coefficient of the leading D-coefficient."""
        return self.lc.lc

    def numerator(self) -> "DiffPoly":
        return DiffPoly(self._coeffs)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "DiffPoly | Poly | Number") -> "DiffPoly":
        return ore_add(self, _as_diffpoly(other))

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return DiffPoly([-p for p in self._coeffs], self._den)

    def __sub__(self, other: "DiffPoly | Poly | Number") -> "DiffPoly":
        return ore_add(self, -_as_diffpoly(other))

    def __rsub__(self, other: "DiffPoly | Poly | Number") -> "DiffPoly":
        return ore_add(_as_diffpoly(other), -self)

    def __mul__(self, other: "DiffPoly | Poly | Number") -> "DiffPoly":
        if isinstance(other, (int, float, np.number)):
            return DiffPoly([p * float(other) for p in self._coeffs], self._den)
        return ore_mul(self, _as_diffpoly(other))

    def __rmul__(self, other: "Poly | Number") -> "DiffPoly":
        if isinstance(other, (int, float, np.number)):
            return self * other
        if isinstance(other, Poly):
            # polynomial on the left multiplies each coefficient
            return DiffPoly([other * p for p in self._coeffs], self._den)
        return NotImplemented

    def __truediv__(self, scalar: Number) -> "DiffPoly":
        return DiffPoly([p / scalar for p in self._coeffs], self._den)

    def __pow__(self, k: int) -> "DiffPoly":
        out = DiffPoly.from_poly(Poly.one())
        for _ in range(k):
            out = out * self
        return out

    def normalized(self) -> "DiffPoly":
        """Scaled to unit coefficient norm."""
        n = dnorm(self)
        if n == 0:
            raise ZeroDivisionError("cannot normalise the zero operator")
        return self / n

    # comparison / display ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self._coeffs == other._coeffs and self._den == other._den

    def __hash__(self) -> int:
        return hash((self._coeffs, self._den))

    def allclose(self, other: "DiffPoly", atol: float = 1e-10) -> bool:
        if not (self._den.allclose(other._den, atol)):
            return False
        n = max(len(self), len(other))
        return all(self[i].allclose(other[i], atol) for i in range(n))

    def __repr__(self) -> str:
        if self.is_zero():
            return "DiffPoly(0)"
        parts = []
        for i, p in enumerate(self._coeffs):
            if p.is_zero():
                continue
            body = " + ".join(
                f"{c:.6g}" + ("" if k == 0 else "*t" if k == 1 else f"*t^{k}")
                for k, c in enumerate(p.coeffs)
                if c != 0
            )
            parts.append(f"({body})" + ("" if i == 0 else "*D" if i == 1 else f"*D^{i}"))
        s = " + ".join(parts)
        if self.has_den():
            s = f"[{s}] / {self._den!r}"
        return f"DiffPoly({s})"

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        out: dict = {"coeffs": [p.to_json() for p in self._coeffs]}
        if self._den != Poly.one():
            out["den"] = self._den.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DiffPoly":
        if not isinstance(data, dict) or "coeffs" not in data:
            raise ValueError('an operator must be a JSON object with a "coeffs" array')
        coeffs = data["coeffs"]
        if not isinstance(coeffs, list):
            raise ValueError('"coeffs" must be an array of polynomial arrays')
        polys = []
        for i, c in enumerate(coeffs):
            try:
                polys.append(Poly.from_json(c))
            except ValueError as exc:
                raise ValueError(f"coeffs[{i}]: {exc}") from None
        den = Poly.from_json(data["den"]) if data.get("den") is not None else None
        return cls(polys, den)


def _as_diffpoly(x: "DiffPoly | Poly | Number") -> DiffPoly:
    if isinstance(x, DiffPoly):
        return x
    if isinstance(x, Poly):
        return DiffPoly([x])
    return DiffPoly([Poly([float(x)])])


# ---------------------------------------------------------------------------
# arithmetic


def _accumulate(out: list[np.ndarray], slot: int, term: np.ndarray) -> None:
    cur = out[slot]
    if len(cur) < len(term):
        cur = np.concatenate([cur, np.zeros(len(term) - len(cur))])
    cur[: len(term)] += term
    out[slot] = cur


def _mul_numerators(A: Sequence[Poly], B: Sequence[Poly]) -> list[np.ndarray]:
    """Product of two polynomial-coefficient operators (right canonical form)."""
    M, N = len(A) - 1, len(B) - 1
    out = [np.zeros(0) for _ in range(M + N + 1)]
    for j, bj in enumerate(B):
        if bj.is_zero():
            continue
        deriv = bj
        for k in range(0, min(M, int(bj.degree)) + 1):
            dk = deriv.coeffs
            for i in range(k, M + 1):
                ai = A[i]
                if ai.is_zero():
                    continue
                _accumulate(out, i - k + j, comb(i, k) * np.convolve(ai.coeffs, dk))
            deriv = deriv.derivative()
    return out


def ore_mul(a: DiffPoly, b: DiffPoly) -> DiffPoly:
    """Product ``a*b`` in right canonical form.

    Uses ``D^i * y = sum_k C(i,k) y^(k) D^(i-k)``. If ``b`` has a
    non-constant denominator ``q`` the derivatives of ``b_j / q`` are kept
    over the common denominator ``den(a) * q^(deg_D a + 1)``.
    """
    if a.is_zero() or b.is_zero():
        return DiffPoly([], a.den * b.den)
    if not b.has_den():
        return DiffPoly([Poly(c) for c in _mul_numerators(a.coeffs, b.coeffs)], a.den)
    M = int(a.order)
    q = b.den
    dq = q.derivative()
    qpow = [Poly.one()]
    for _ in range(M):
        qpow.append(qpow[-1] * q)
    out = [Poly() for _ in range(M + len(b) )]
    for j, bj in enumerate(b.coeffs):
        # P_k with (b_j/q)^(k) = P_k / q^(k+1)
        P = bj
        for k in range(M + 1):
            if not P.is_zero():
                for i in range(k, M + 1):
                    ai = a[i]
                    if ai.is_zero():
                        continue
                    out[i - k + j] = out[i - k + j] + comb(i, k) * (ai * P * qpow[M - k])
            P = P.derivative() * q - (k + 1) * (P * dq)
    return DiffPoly(out, a.den * qpow[M] * q)


def ore_add(a: DiffPoly, b: DiffPoly) -> DiffPoly:
    if a.den == b.den:
        n = max(len(a), len(b))
        return DiffPoly([a[i] + b[i] for i in range(n)], a.den)
    n = max(len(a), len(b))
    return DiffPoly([b.den * a[i] + a.den * b[i] for i in range(n)], a.den * b.den)


def _require_no_den(f: DiffPoly) -> None:
    if f.has_den():
        raise ValueError("clear denominators first")


def dnorm(f: DiffPoly) -> float:
    """Euclidean norm of all t-coefficients of all D-coefficients."""
    _require_no_den(f)
    n = np.array([p.norm() for p in f.coeffs])
    m = float(n.max()) if n.size else 0.0
    return m * float(np.linalg.norm(n / m)) if m > 0 else 0.0


def deg_vec(f: DiffPoly) -> DegreeVector:
    """t-degrees of the D-coefficients (``-inf`` for zero slots)."""
    return tuple(p.degree for p in f.coeffs)


def deg_vec_leq(u: Sequence[Degree], v: Sequence[Degree]) -> bool:
    """Componentwise ``u <= v`` with missing entries read as ``-inf``."""
    n = max(len(u), len(v))
    uu = list(u) + [NEG_INF] * (n - len(u))
    vv = list(v) + [NEG_INF] * (n - len(v))
    return all(a <= b for a, b in zip(uu, vv))


def vec(f: DiffPoly, pad_degrees: Sequence[Degree] | None = None) -> np.ndarray:
    """Concatenated coefficient vectors, optionally zero padded per slot."""
    _require_no_den(f)
    if pad_degrees is None:
        pad_degrees = deg_vec(f)
    if not deg_vec_leq(deg_vec(f), pad_degrees):
        raise ValueError("pad degrees are smaller than the degree vector")
    parts = [f[i].padded(_slot_len(dg)) for i, dg in enumerate(pad_degrees)]
    return np.concatenate(parts) if parts else np.zeros(0)


def unvec(x: np.ndarray, degrees: Sequence[Degree]) -> DiffPoly:
    x = np.asarray(x, dtype=float)
    lens = [_slot_len(dg) for dg in degrees]
    if len(x) != sum(lens):
        raise ValueError(f"vector length {len(x)} does not match degree structure ({sum(lens)})")
    offs = np.concatenate([[0], np.cumsum(lens)]).astype(int)
    return DiffPoly([Poly(x[offs[i] : offs[i + 1]]) for i in range(len(lens))])


def _slot_len(dg: Degree) -> int:
    return 0 if dg == NEG_INF else int(dg) + 1


# ---------------------------------------------------------------------------
# content


def content(f: DiffPoly, mode: str = "approximate", eps: float = 1e-6) -> Poly:
    """Monic GCD of the D-coefficients of ``f``.

    ``mode="exact"`` rationalizes the floating point coefficients and uses
    an exact rational GCD; ``mode="approximate"`` uses the numerical
    approximate GCD at tolerance ``eps``.
    """
    _require_no_den(f)
    slots = [p for p in f.coeffs if not p.is_zero()]
    if not slots:
        raise ValueError("content of the zero operator is undefined")
    if len(slots) == 1:
        return slots[0].monic()
    if mode == "exact":
        import sympy

        t = sympy.Symbol("t")
        g = None
        for p in slots:
            sp = sympy.Poly([Fraction(float(c)) for c in p.coeffs[::-1]], t, domain=sympy.QQ)
            g = sp if g is None else sympy.gcd(g, sp)
        g = g.monic()
        return Poly([float(c) for c in g.all_coeffs()[::-1]])
    if mode == "approximate":
        return approx_gcd(slots, eps).gcd
    raise ValueError(f"unknown content mode {mode!r}")


def primitive_part(
    f: DiffPoly, c: Poly | None = None, mode: str = "approximate", eps: float = 1e-6
) -> DiffPoly:
    """Least-squares division of every coefficient of ``f`` by its content."""
    if c is None:
        c = content(f, mode, eps)
    if c.degree == 0:
        return f / c.lc
    return DiffPoly([ls_divide(p, c)[0] if not p.is_zero() else Poly() for p in f.coeffs])


# ---------------------------------------------------------------------------
# left canonical form


def to_left_coeffs(f: DiffPoly) -> list[Poly]:
    """Coefficients ``c_k`` with ``f = sum_k D^k c_k`` (numerator only)."""
    _require_no_den(f)
    out = [Poly() for _ in range(len(f))]
    for i, p in enumerate(f.coeffs):
        deriv = p
        for k in range(i + 1):
            if deriv.is_zero():
                break
            out[i - k] = out[i - k] + ((-1) ** k * comb(i, k)) * deriv
            deriv = deriv.derivative()
    return out


def from_left_coeffs(c: Sequence[Poly]) -> DiffPoly:
    """Inverse of :func:`to_left_coeffs`."""
    out = [Poly() for _ in range(len(c))]
    for i, p in enumerate(c):
        deriv = p
        for k in range(i + 1):
            if deriv.is_zero():
                break
            out[i - k] = out[i - k] + comb(i, k) * deriv
            deriv = deriv.derivative()
    return DiffPoly(out)


# ---------------------------------------------------------------------------
# text input


def parse_diffpoly(text: str) -> DiffPoly:
    """Parse an operator written with symbols ``t`` and ``D``.

    Each monomial ``c*t^a*D^b`` is read in right canonical form, i.e. as
    ``c t^a`` placed to the left of ``D^b``. ``^`` and the character ``∂``
    are accepted.
    """
    import sympy

    t, D = sympy.symbols("t D")
    expr = sympy.sympify(text.replace("∂", "D").replace("^", "**"), locals={"t": t, "D": D})
    P = sympy.Poly(sympy.expand(expr), D, t)
    if P.is_zero:
        return DiffPoly()
    M = P.degree(D)
    d = max(P.degree(t), 0)
    arr = np.zeros((M + 1, d + 1))
    for (i, j), c in P.terms():
        arr[i, j] = float(c)
    return DiffPoly([Poly(row) for row in arr])


# ---------------------------------------------------------------------------
# bilinear structure of the product


def slot_offsets(degrees: Sequence[Degree]) -> np.ndarray:
    """Start index of every slot in :func:`vec` layout, plus the total length."""
    return np.concatenate([[0], np.cumsum([_slot_len(dg) for dg in degrees])]).astype(int)


def product_degrees(a_degrees: Sequence[Degree], b_degrees: Sequence[Degree]) -> list[Degree]:
    """Slotwise t-degree bound of ``a*b`` for the given degree structures."""
    n = len(a_degrees) + len(b_degrees) - 1
    out: list[Degree] = [NEG_INF] * max(n, 0)
    for j, da in enumerate(a_degrees):
        if da == NEG_INF:
            continue
        for i, db in enumerate(b_degrees):
            if db == NEG_INF:
                continue
            for k in range(min(j, int(db)) + 1):
                out[i + j - k] = max(out[i + j - k], int(da) + int(db) - k)
    return out


def mul_tensor(
    a_degrees: Sequence[Degree], b_degrees: Sequence[Degree], out_degrees: Sequence[Degree] | None = None
) -> np.ndarray:
    """Tensor ``T`` with ``vec(a*b)[k] = sum T[k, p, q] vec(a)[p] vec(b)[q]``.

    Uses ``(t^p D^j)(t^q D^i) = t^p sum_k C(j,k) (t^q)^(k) D^(i+j-k)``.
    Every product term must fit inside ``out_degrees`` (default: the
    tight bound from :func:`product_degrees`).
    """
    if out_degrees is None:
        out_degrees = product_degrees(a_degrees, b_degrees)
    oa, ob, oo = slot_offsets(a_degrees), slot_offsets(b_degrees), slot_offsets(out_degrees)
    T = np.zeros((oo[-1], oa[-1], ob[-1]))
    for j, da in enumerate(a_degrees):
        for i, db in enumerate(b_degrees):
            for p in range(_slot_len(da)):
                for q in range(_slot_len(db)):
                    fall = 1.0  # q (q-1) ... (q-k+1)
                    for k in range(min(j, q) + 1):
                        if k:
                            fall *= q - k + 1
                        slot, deg = i + j - k, p + q - k
                        if slot >= len(out_degrees) or deg >= _slot_len(out_degrees[slot]):
                            raise ValueError("product does not fit the requested degree structure")
                        T[oo[slot] + deg, oa[j] + p, ob[i] + q] += comb(j, k) * fall
    return T
