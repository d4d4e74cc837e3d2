import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import coeff_distance
from ore_gcrd.approxgcd import approx_gcd_degree
from ore_gcrd.benchmarks import three_factor_exact, three_factor_noisy
from ore_gcrd.division import right_divide_ls
from ore_gcrd.embed import embed
from ore_gcrd.errors import AlgorithmError
from ore_gcrd.experiment import inject_noise
from ore_gcrd.gcrd import (
    LeastSquaresGcrd,
    deflated_perturbation,
    gcrd_via_ls,
    leading_degree_bound,
    nearby_with_gcrd,
    numeric_gcrd,
)
from ore_gcrd.oracle import PlantSpec, plant_instance
from ore_gcrd.ore import deg_vec, deg_vec_leq, dnorm, parse_diffpoly

H = parse_diffpoly("t*D - 1")
F = parse_diffpoly("D + t") * H
G = parse_diffpoly("D^2 + 2") * H

METHODS = [gcrd_via_ls, numeric_gcrd]


@pytest.mark.parametrize("method", METHODS)
class TestSmallExample:
    def test_recovers_factor(self, method):
        r = method(F, G)
        assert r.degree == 1 and not r.coprime
        assert coeff_distance(r.h, H) <= 1e-10
        assert r.residual <= 1e-10

    def test_coprime(self, method):
        r = method(parse_diffpoly("D^2 + t"), parse_diffpoly("D - 1"))
        assert r.coprime and r.h is None and r.degree == 0

    def test_forced_degree_out_of_range(self, method):
        with pytest.raises(ValueError):
            method(F, G, degree=3)

    def test_right_factor(self, method):
        r = method(F, G)
        for p in (F, G):
            assert right_divide_ls(p, r.h).residual <= 1e-9 * dnorm(p)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("method", METHODS)
def test_planted_recovery(method, seed):
    rng = np.random.default_rng(seed)
    M, N = (int(x) for x in rng.integers(2, 4, size=2))
    spec = PlantSpec(M, N, int(rng.integers(1, min(M, N))), int(rng.integers(0, 3)))
    inst = plant_instance(spec, seed)
    r = method(inst.f_float.normalized(), inst.g_float.normalized())
    assert r.degree == spec.D
    assert coeff_distance(r.h, inst.h_float) <= 1e-8


def test_leading_slot_respects_bound():
    inst = plant_instance(PlantSpec(3, 3, 2, 2), 8)
    f, g = inst.f_float, inst.g_float
    r = gcrd_via_ls(f, g)
    assert r.h.lc.degree <= leading_degree_bound(f, g)
    assert abs(r.h.lc_lc - 1.0) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_ls_output_is_primitive(seed):
    inst = plant_instance(PlantSpec(3, 2, 2, 2, 1), seed)
    h = gcrd_via_ls(inst.f_float.normalized(), inst.g_float.normalized()).h
    slots = [p for p in h.coeffs if not p.is_zero()]
    assert approx_gcd_degree(slots, 1e-9) == 0


class TestLeastSquaresProblem:
    def test_search_path_and_fit(self):
        inst = plant_instance(PlantSpec(3, 3, 1, 2), 5)
        prob = LeastSquaresGcrd(inst.f_float.normalized(), inst.g_float.normalized())
        path: list = []
        degs = prob.search_degrees(path)
        assert path[-1] == degs
        # every visited structure is componentwise no larger than its predecessor
        for a, b in zip(path, path[1:]):
            assert all(x >= y for x, y in zip(a, b))
        assert prob.fit(degs) <= 1e-9
        assert coeff_distance(prob.solve(degs).h, inst.h_float) <= 1e-8

    def test_solve_checks_length(self):
        prob = LeastSquaresGcrd(F, G)
        with pytest.raises(ValueError):
            prob.solve([0])

    def test_explicit_degrees(self):
        r = gcrd_via_ls(F, G, degrees=[0, 1])
        assert coeff_distance(r.h, H) <= 1e-10

    def test_unreachable_leading_slot(self):
        # forcing the leading coefficient to degree 0 when the factor needs t*D
        with pytest.raises(AlgorithmError) as exc:
            LeastSquaresGcrd(F, G).solve([1, 0])
        assert exc.value.kind == "ill_conditioned"


class TestDeflatedPerturbation:
    def test_identity_on_own_matrix(self):
        e = embed(F, G)
        f, g = deflated_perturbation(e.S_hat, e)
        assert coeff_distance(f, F) <= 1e-14 and coeff_distance(g, G) <= 1e-14

    def test_shape_checked(self):
        e = embed(F, G)
        with pytest.raises(ValueError):
            deflated_perturbation(e.S_hat[1:], e)

    def test_truncates_to_input_degrees(self, rng):
        e = embed(F, G)
        f, g = deflated_perturbation(e.S_hat + rng.standard_normal(e.S_hat.shape), e)
        assert deg_vec_leq(deg_vec(f), deg_vec(F)) and deg_vec_leq(deg_vec(g), deg_vec(G))


class TestNearby:
    def test_exact_input_is_fixed_point(self):
        inst = plant_instance(PlantSpec(3, 2, 1, 1), 2)
        f, g = inst.f_float.normalized(), inst.g_float.normalized()
        n = nearby_with_gcrd(f, g)
        assert coeff_distance(n.f, f) <= 1e-10 and coeff_distance(n.g, g) <= 1e-10

    def test_noisy_pair_moves_by_noise_size(self):
        inst = plant_instance(PlantSpec(3, 3, 2, 1), 4)
        rng = np.random.default_rng(0)
        f = inject_noise(inst.f_float.normalized(), 1e-6, rng)
        g = inject_noise(inst.g_float.normalized(), 1e-6, rng)
        n = nearby_with_gcrd(f, g, 1e-4)
        assert n.gcrd.degree == 2
        assert dnorm(n.f - f) + dnorm(n.g - g) <= 1e-4
        assert coeff_distance(n.gcrd.h, inst.h_float) <= 1e-3

    def test_coprime_pair_unchanged(self):
        f, g = parse_diffpoly("D^2 + t"), parse_diffpoly("D - 1")
        n = nearby_with_gcrd(f, g)
        assert n.gcrd.coprime and n.f == f and n.g == g

    def test_json(self):
        js = nearby_with_gcrd(F, G).to_json()
        assert set(js) == {"f", "g", "gcrd"}
        assert js["gcrd"]["degree"] == 1 and "singular_values" not in js["gcrd"]["rank_report"]

    @pytest.mark.parametrize("bench", [three_factor_exact, three_factor_noisy])
    def test_printed_examples_close_to_reported_guess(self, bench):
        b = bench()
        n = nearby_with_gcrd(b.f, b.g, 1e-4)
        assert n.gcrd.degree == 3
        # inputs carry only five digits, so agreement is to a few percent
        assert coeff_distance(n.gcrd.h, b.h_guess / b.h_guess.lc_lc) <= 2e-2


@given(st.integers(0, 10**6), st.sampled_from([1e-9, 1e-6, 1e-3]))
def test_nearby_never_raises_degrees(seed, noise):
    rng = np.random.default_rng(seed)
    M, N = (int(x) for x in rng.integers(1, 4, size=2))
    spec = PlantSpec(M, N, int(rng.integers(1, min(M, N) + 1)), int(rng.integers(1, 3)))
    inst = plant_instance(spec, rng)
    f = inject_noise(inst.f_float.normalized(), noise, rng)
    g = inject_noise(inst.g_float.normalized(), noise, rng)
    try:
        n = nearby_with_gcrd(f, g, 10 * noise)
    except AlgorithmError:
        return
    assert deg_vec_leq(deg_vec(n.f), deg_vec(f))
    assert deg_vec_leq(deg_vec(n.g), deg_vec(g))
