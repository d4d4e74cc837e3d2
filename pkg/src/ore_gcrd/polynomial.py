"""Dense univariate polynomials and rational functions in t over the reals.

Coefficients are stored in ascending order of degree. Trailing zeros are
stripped on construction so that the stored length always equals
``degree + 1``; the zero polynomial has an empty coefficient array and
degree ``-inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

NEG_INF = float("-inf")

Number = Union[int, float, np.floating]


class Poly:
    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Number] | np.ndarray = ()) -> None:
        c = np.array(coeffs, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.flags.writeable = False
        self._c = c

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def one(cls) -> "Poly":
        return cls([1.0])

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "Poly":
        a = np.zeros(k + 1)
        a[k] = c
        return cls(a)

    # basic properties ------------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | float:
        return len(self._c) - 1 if len(self._c) else NEG_INF

    def is_zero(self) -> bool:
        return len(self._c) == 0

    @property
    def lc(self) -> float:
        return float(self._c[-1]) if len(self._c) else 0.0

    def padded(self, length: int) -> np.ndarray:
        """Coefficient vector zero-padded to ``length`` entries."""
        if len(self._c) > length:
            raise ValueError(f"degree {self.degree} does not fit in {length} slots")
        out = np.zeros(length)
        out[: len(self._c)] = self._c
        return out

    def norm(self) -> float:
        # scaled so tiny nonzero coefficients do not underflow to a zero norm
        m = float(np.max(np.abs(self._c))) if len(self._c) else 0.0
        return m * float(np.linalg.norm(self._c / m)) if m > 0 else 0.0

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "Poly | Number") -> "Poly":
        other = _as_poly(other)
        n = max(len(self._c), len(other._c))
        return Poly(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-self._c)

    def __sub__(self, other: "Poly | Number") -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: "Poly | Number") -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other: "Poly | Number") -> "Poly":
        if isinstance(other, Poly):
            if self.is_zero() or other.is_zero():
                return Poly()
            return Poly(np.convolve(self._c, other._c))
        if isinstance(other, (int, float, np.number)):
            return Poly(self._c * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> "Poly":
        return Poly(self._c / float(scalar))

    def __pow__(self, k: int) -> "Poly":
        out = Poly.one()
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, k: int = 1) -> "Poly":
        c = self._c
        for _ in range(k):
            if len(c) <= 1:
                return Poly()
            c = c[1:] * np.arange(1, len(c))
        return Poly(c)

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        return np.polynomial.polynomial.polyval(t, self._c) if len(self._c) else 0.0 * t

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return self / self.lc

    def truncate(self, deg: int | float) -> "Poly":
        """Drop all coefficients above degree ``deg``."""
        if deg == NEG_INF or deg < 0:
            return Poly()
        return Poly(self._c[: int(deg) + 1])

    # comparison / display ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float)):
            other = Poly([other])
        if not isinstance(other, Poly):
            return NotImplemented
        return len(self._c) == len(other._c) and bool(np.all(self._c == other._c))

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    def allclose(self, other: "Poly", atol: float = 1e-12) -> bool:
        n = max(len(self._c), len(other._c))
        return bool(np.allclose(self.padded(n), other.padded(n), rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self._c):
            if c == 0:
                continue
            terms.append(f"{c:.6g}" + ("" if k == 0 else "*t" if k == 1 else f"*t^{k}"))
        return "Poly(" + " + ".join(terms) + ")"

    def to_json(self) -> list[float]:
        return [float(x) for x in self._c]

    @classmethod
    def from_json(cls, data: Sequence[Number]) -> "Poly":
        if not isinstance(data, (list, tuple)) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in data
        ):
            raise ValueError("a polynomial must be a JSON array of numbers")
        return cls(data)


def _as_poly(x: "Poly | Number") -> Poly:
    return x if isinstance(x, Poly) else Poly([float(x)])


def poly_norm(p: Poly) -> float:
    """Euclidean norm of the coefficient vector."""
    return p.norm()


def trim(p: Poly, tol: float) -> Poly:
    """Zero coefficients with magnitude ``<= tol`` and strip trailing zeros."""
    c = np.array(p.coeffs)
    c[np.abs(c) <= tol] = 0.0
    return Poly(c)


def conv_matrix(b: Poly, k: int) -> np.ndarray:
    """Matrix ``C`` of shape ``(m+k+1, k+1)`` with ``C @ a == coeffs(a*b)``.

    ``m = deg b``. Multiplying on the left by any vector of length ``k+1``
    holding the coefficients of ``a`` (``deg a <= k``) yields those of ``a*b``.
    """
    if b.is_zero():
        raise ValueError("zero polynomial has no convolution matrix")
    if k < 0:
        raise ValueError("k must be non-negative")
    m = int(b.degree)
    C = np.zeros((m + k + 1, k + 1))
    for j in range(k + 1):
        C[j : j + m + 1, j] = b.coeffs
    return C


def gamma(a: Poly, d: int, mu: int) -> np.ndarray:
    """Banded embedding of ``a`` (``deg a <= d``) as a ``(mu+1, mu+d+1)`` block.

    Row ``i`` holds the coefficients of ``t**i * a``, so a row vector of
    coefficients of ``u`` (``deg u <= mu``) times the block gives ``u*a``.
    """
    if a.degree > d:
        raise ValueError(f"deg a = {a.degree} exceeds block degree d = {d}")
    G = np.zeros((mu + 1, mu + d + 1))
    c = a.coeffs
    for i in range(mu + 1):
        G[i, i : i + len(c)] = c
    return G


def gamma_inv(block: np.ndarray) -> Poly:
    """Least-squares inverse of :func:`gamma`.

    Returns the polynomial ``a`` minimising the Frobenius distance between
    ``gamma(a)`` and ``block``: each coefficient is the mean of the matching
    diagonal.
    """
    block = np.asarray(block, dtype=float)
    rows, cols = block.shape
    d = cols - rows
    if d < 0:
        raise ValueError("block must have at least as many columns as rows")
    return Poly([np.diagonal(block, offset=j).mean() for j in range(d + 1)])


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Euclidean division of ``a`` by ``b`` (floating point)."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.degree < b.degree:
        return Poly(), a
    q, r = np.polynomial.polynomial.polydiv(a.coeffs, b.coeffs)
    return Poly(q), Poly(r)


def ls_divide(a: Poly, b: Poly, qdeg: int | None = None) -> tuple[Poly, float]:
    """Least-squares quotient ``q`` minimising ``||a - q*b||``.

    Returns the quotient and the residual norm.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return Poly(), 0.0
    if qdeg is None:
        qdeg = int(a.degree) - int(b.degree)
    if qdeg < 0:
        return Poly(), a.norm()
    C = conv_matrix(b, qdeg)
    rhs = a.padded(max(C.shape[0], len(a.coeffs)))
    if len(rhs) > C.shape[0]:
        C = np.vstack([C, np.zeros((len(rhs) - C.shape[0], C.shape[1]))])
    q, *_ = np.linalg.lstsq(C, rhs, rcond=None)
    res = float(np.linalg.norm(C @ q - rhs))
    return Poly(q), res


@dataclass(frozen=True)
class RatFun:
    """Rational function ``num/den`` with ``den`` normalised to leading coefficient 1.

    No cancellation is performed automatically; see
    :func:`ore_gcrd.division.lowest_terms`.
    """

    num: Poly
    den: Poly

    def __post_init__(self) -> None:
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        s = self.den.lc
        if s != 1.0:
            object.__setattr__(self, "num", self.num / s)
            object.__setattr__(self, "den", self.den / s)

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFun":
        return cls(p, Poly.one())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RatFun | Poly | Number") -> "RatFun":
        other = _as_ratfun(other)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den)

    def __sub__(self, other: "RatFun | Poly | Number") -> "RatFun":
        return self + (-_as_ratfun(other))

    def __mul__(self, other: "RatFun | Poly | Number") -> "RatFun":
        other = _as_ratfun(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatFun | Poly | Number") -> "RatFun":
        other = _as_ratfun(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def derivative(self) -> "RatFun":
        return RatFun(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        return self.num(t) / self.den(t)


def _as_ratfun(x: "RatFun | Poly | Number") -> RatFun:
    if isinstance(x, RatFun):
        return x
    return RatFun.from_poly(_as_poly(x))
