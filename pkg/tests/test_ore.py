import math

import numpy as np
import pytest
from hypothesis import given

from conftest import coeff_distance, diffpolys
from ore_gcrd.oracle import from_diffpoly, qdiff_mul, to_diffpoly
from ore_gcrd.ore import (
    NEG_INF,
    DiffPoly,
    content,
    deg_vec,
    deg_vec_leq,
    dnorm,
    from_left_coeffs,
    ore_add,
    ore_mul,
    parse_diffpoly,
    primitive_part,
    to_left_coeffs,
    unvec,
    vec,
)
from ore_gcrd.polynomial import Poly

D = DiffPoly.d()
T = DiffPoly.t()


class TestMultiplication:
    def test_d_times_t(self):
        assert ore_mul(D, T) == parse_diffpoly("t*D + 1")

    def test_d2_times_t2(self):
        assert ore_mul(D**2, T * T) == parse_diffpoly("t^2*D^2 + 4*t*D + 2")

    def test_factored_product(self):
        assert ore_mul(D + T, D - 1.0) == parse_diffpoly("D^2 + (t-1)*D - t")

    def test_noncommutative_witness(self):
        diff = ore_mul(D, T) - ore_mul(T, D)
        assert diff == DiffPoly([[1.0]])

    def test_denominators_multiply(self):
        inv_t = DiffPoly([[1.0]], den=[0.0, 1.0])
        p = ore_mul(D, inv_t)
        # D (1/t) = (1/t) D - 1/t^2
        x = 1.3
        assert p.has_den()
        assert p[0](x) / p.den(x) == pytest.approx(-1 / x**2)
        assert p[1](x) / p.den(x) == pytest.approx(1 / x)

    @given(diffpolys(), diffpolys())
    def test_matches_exact_oracle(self, a, b):
        exact = to_diffpoly(qdiff_mul(from_diffpoly(a), from_diffpoly(b)))
        assert coeff_distance(ore_mul(a, b), exact) <= 1e-9 * (1 + dnorm(exact))

    @given(diffpolys(), diffpolys())
    def test_degree_law(self, a, b):
        assert ore_mul(a, b).order == a.order + b.order

    @given(diffpolys(3, 2), diffpolys(3, 2), diffpolys(3, 2))
    def test_associativity(self, a, b, c):
        left, right = ore_mul(ore_mul(a, b), c), ore_mul(a, ore_mul(b, c))
        assert coeff_distance(left, right) <= 1e-10 * (1 + dnorm(left))

    @given(diffpolys(), diffpolys(), diffpolys())
    def test_distributivity(self, a, b, c):
        left = ore_mul(a, ore_add(b, c))
        right = ore_add(ore_mul(a, b), ore_mul(a, c))
        assert coeff_distance(left, right) <= 1e-10 * (1 + dnorm(left))


class TestAddition:
    def test_zero_identity(self):
        f = parse_diffpoly("t*D^2 + 3")
        assert ore_add(f, DiffPoly()) == f

    def test_leading_cancellation(self):
        s = ore_add(D - 1.0, -D)
        assert s == DiffPoly([[-1.0]])
        assert s.order == 0

    @given(diffpolys(), diffpolys())
    def test_vec_linear(self, f, g):
        s = ore_add(f, g)
        n = max(len(f), len(g))
        pad = [int(max(f[i].degree, g[i].degree, 0)) for i in range(n)]
        np.testing.assert_allclose(_vec_n(s, pad), _vec_n(f, pad) + _vec_n(g, pad))
        assert s.order <= max(f.order, g.order)


def _vec_n(f: DiffPoly, pad: list[int]) -> np.ndarray:
    """``vec`` over a fixed slot count, zero slots included."""
    return np.concatenate([f[i].padded(p + 1) for i, p in enumerate(pad)])


class TestNorms:
    @pytest.mark.parametrize("text, expected", [("D", 1.0), ("t*D + 1", math.sqrt(2))])
    def test_examples(self, text, expected):
        assert dnorm(parse_diffpoly(text)) == pytest.approx(expected)

    def test_denominator_rejected(self):
        with pytest.raises(ValueError, match="clear denominators first"):
            dnorm(DiffPoly([[1.0]], den=[0.0, 1.0]))

    @given(diffpolys(ints=False))
    def test_normalized_unit(self, f):
        if dnorm(f) == 0:
            return
        assert dnorm(f.normalized()) == pytest.approx(1.0)

    @given(diffpolys(ints=False))
    def test_norm_zero_iff_zero(self, f):
        assert (dnorm(f) == 0) == f.is_zero()


class TestDegreeVector:
    def test_read_off(self):
        assert deg_vec(parse_diffpoly("t^2*D + 1")) == (0, 2)

    def test_zero_slot(self):
        assert deg_vec(parse_diffpoly("D^2 + 1")) == (0, NEG_INF, 0)

    @given(diffpolys())
    def test_reflexive(self, f):
        assert deg_vec_leq(deg_vec(f), deg_vec(f))

    def test_componentwise(self):
        assert deg_vec_leq((0, 1), (1, 1, 0))
        assert not deg_vec_leq((2, 0), (1, 5))


class TestVec:
    def test_examples(self):
        np.testing.assert_array_equal(vec(D - 1.0), [-1, 1])
        np.testing.assert_array_equal(vec(parse_diffpoly("t*D + 1"), (1, 1)), [1, 0, 0, 1])

    def test_pad_too_small(self):
        with pytest.raises(ValueError):
            vec(parse_diffpoly("t^2*D"), (0, 1))

    @given(diffpolys(ints=False))
    def test_round_trip(self, f):
        assert unvec(vec(f), deg_vec(f)) == f


class TestContent:
    def test_trivial(self):
        f = parse_diffpoly("D^2 + t")
        c = content(f, "exact")
        assert c.degree == 0
        assert primitive_part(f, c).allclose(f)

    def test_linear_content_exact(self):
        f = parse_diffpoly("(t+1)*D + (t+1)")
        c = content(f, "exact")
        assert c.allclose(Poly([1.0, 1.0]), 1e-12)
        assert primitive_part(f, c).allclose(D + 1.0, 1e-12)

    def test_linear_content_approximate(self, rng):
        f = parse_diffpoly("(t+1)*D + (t+1)")
        noisy = DiffPoly([Poly(p.coeffs + 1e-9 * rng.standard_normal(len(p.coeffs))) for p in f.coeffs])
        c = content(noisy, "approximate", 1e-6)
        assert c.allclose(Poly([1.0, 1.0]), 1e-6)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            content(DiffPoly())


class TestLeftForm:
    @given(diffpolys())
    def test_round_trip(self, f):
        assert from_left_coeffs(to_left_coeffs(f)).allclose(f, 1e-9)

    def test_example(self):
        # t D = D t - 1
        c = to_left_coeffs(T * D)
        assert c[0].allclose(Poly([-1.0]))
        assert c[1].allclose(Poly([0.0, 1.0]))


class TestJson:
    def test_round_trip(self):
        f = DiffPoly([[1.0, 2.0], [0.0, 0.5]], den=[1.0, 1.0])
        assert DiffPoly.from_json(f.to_json()) == f

    def test_den_omitted_means_one(self):
        assert not DiffPoly.from_json({"coeffs": [[1], [0, 1]]}).has_den()

    @pytest.mark.parametrize("bad", [[1, 2], {"coeffs": 3}, {"coeffs": [["x"]]}])
    def test_malformed(self, bad):
        with pytest.raises(ValueError):
            DiffPoly.from_json(bad)
