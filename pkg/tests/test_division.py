import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import coeff_distance, diffpolys
from ore_gcrd.division import (
    cleared_residual,
    cofactor_degrees,
    lowest_terms,
    right_divide_ls,
    right_divide_naive,
)
from ore_gcrd.errors import AlgorithmError
from ore_gcrd.ore import NEG_INF, DiffPoly, deg_vec, ore_mul, parse_diffpoly
from ore_gcrd.polynomial import Poly, RatFun

D = DiffPoly.d()
H_RAT = parse_diffpoly("t*D - 1")
# (1/t) D + 1 times t D - 1
F_RAT = parse_diffpoly("D^2 + t*D - 1")


def value(q: DiffPoly, x: float) -> list[float]:
    """Coefficients of ``q`` evaluated at ``t = x``."""
    return [c(x) / q.den(x) for c in q.coeffs]


DIVIDERS = [right_divide_naive, right_divide_ls]


@pytest.mark.parametrize("divide", DIVIDERS)
class TestExamples:
    def test_exact_polynomial(self, divide):
        r = divide(parse_diffpoly("D^2 - 1"), parse_diffpoly("D - 1"))
        assert coeff_distance(r.quotient, parse_diffpoly("D + 1")) <= 1e-12
        assert r.residual <= 1e-12 and r.den_degree == 0

    def test_rational_cofactor(self, divide):
        r = divide(F_RAT, H_RAT)
        assert r.den_degree == 1
        assert r.residual <= 1e-10
        np.testing.assert_allclose(value(r.quotient, 1.7), [1.0, 1 / 1.7], rtol=1e-9)

    def test_divisor_too_long(self, divide):
        with pytest.raises(ValueError):
            divide(D, D * D)

    def test_zero_operand(self, divide):
        with pytest.raises(ValueError):
            divide(DiffPoly(), D)

    def test_denominators_rejected(self, divide):
        with pytest.raises(ValueError, match="clear denominators first"):
            divide(DiffPoly([[1.0], [1.0]], den=[0.0, 1.0]), D)


def test_naive_rejects_vanishing_lead():
    with pytest.raises(AlgorithmError):
        right_divide_naive(D * D, DiffPoly([[1.0], [1e-12]]))


def test_ls_reports_non_divisor_residual():
    r = right_divide_ls(parse_diffpoly("D^2 + t"), parse_diffpoly("D - 1"), den_degree=0)
    assert r.residual > 1e-2


def test_ls_negative_den_degree():
    with pytest.raises(ValueError):
        right_divide_ls(F_RAT, H_RAT, den_degree=-1)


def test_forced_polynomial_cofactor_on_rational_quotient():
    # no polynomial quotient exists, so the residual stays visible
    r = right_divide_ls(F_RAT, H_RAT, den_degree=0)
    assert r.den_degree == 0 and r.residual > 1e-3


class TestCofactorDegrees:
    def test_uniform_bound(self):
        assert cofactor_degrees([2, 3, 1], [1, 1]) == [2, 0]

    def test_top_slot_exact(self):
        assert cofactor_degrees([1, 1, 2], [0, 1]) == [1, 1]

    def test_clipped(self):
        assert cofactor_degrees([0, 0], [2, 0]) == [0]

    def test_errors(self):
        with pytest.raises(ValueError):
            cofactor_degrees([1], [1, 1])
        with pytest.raises(ValueError):
            cofactor_degrees([NEG_INF, NEG_INF], [0])

    @given(diffpolys(2, 2), diffpolys(2, 2, min_order=1))
    def test_bounds_true_cofactor(self, q, h):
        f = ore_mul(q, h)
        bound = cofactor_degrees(list(deg_vec(f)), list(deg_vec(h)))
        assert all(x <= b for x, b in zip(deg_vec(q), bound))


class TestLowestTerms:
    def test_cancels_common_factor(self):
        r = lowest_terms(RatFun(Poly([-1, 0, 1]), Poly([-1, 1]) * Poly([2, 1])))
        assert r.den.allclose(Poly([2, 1]), 1e-10)
        assert r.num.allclose(Poly([1, 1]), 1e-10)

    def test_already_reduced(self):
        r = lowest_terms(RatFun(Poly([1.0]), Poly([0.0, 1.0])))
        assert r.den.allclose(Poly([0.0, 1.0]))

    def test_zero(self):
        r = lowest_terms(RatFun(Poly(), Poly([1, 1])))
        assert r.num.is_zero() and r.den == Poly.one()


def test_cleared_residual_of_exact_quotient():
    q = DiffPoly([[0.0, 1.0], [1.0]], den=[0.0, 1.0])
    assert cleared_residual(F_RAT, q, H_RAT) <= 1e-14


@given(diffpolys(2, 2), diffpolys(2, 2, min_order=1), st.sampled_from(DIVIDERS))
def test_round_trip_polynomial_cofactor(q, h, divide):
    if h.lc.degree > 0:
        return  # a nonconstant leading coefficient allows rational quotients
    f = ore_mul(q, h)
    r = divide(f, h)
    assert r.den_degree == 0
    assert coeff_distance(r.quotient, q) <= 1e-8 * (1 + max(abs(c) for p in q.coeffs for c in p.coeffs))


@pytest.mark.parametrize("seed", range(15))
def test_naive_and_ls_agree(seed):
    rng = np.random.default_rng(seed)
    q = DiffPoly([rng.integers(-3, 4, size=2).astype(float) for _ in range(2)] + [[1.0]])
    h = DiffPoly([rng.integers(-3, 4, size=2).astype(float), [1.0, 1.0]])
    f = ore_mul(q, h)
    a, b = right_divide_naive(f, h), right_divide_ls(f, h)
    assert a.residual <= 1e-9 and b.residual <= 1e-9
    for x in (0.3, 2.1):
        np.testing.assert_allclose(value(a.quotient, x), value(b.quotient, x), rtol=1e-7, atol=1e-9)


def test_den_degree_search_finds_minimum():
    r = right_divide_ls(F_RAT, H_RAT)
    assert r.den_degree == 1
    assert r.to_json()["method"] == "least-squares"
