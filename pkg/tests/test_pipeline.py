import numpy as np
import pytest

from conftest import coeff_distance
from ore_gcrd.benchmarks import ALL, second_order_noisy, three_factor_exact
from ore_gcrd.errors import AlgorithmError
from ore_gcrd.oracle import PlantSpec, plant_instance
from ore_gcrd.ore import DiffPoly, dnorm, parse_diffpoly
from ore_gcrd.pipeline import PHI_FLOOR, PipelineConfig, approximate_gcrd

H = parse_diffpoly("t*D - 1")
F = parse_diffpoly("D + t") * H
G = parse_diffpoly("D^2 + 2") * H


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [{"method": "qr"}, {"cofactors": "none"}, {"epsilon_rank": 0.0}, {"newton_iters": -1}]
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            PipelineConfig(**kw)


@pytest.mark.parametrize("method", ["nearby", "ls", "svd"])
def test_small_exact_example(method):
    r = approximate_gcrd(F, G, PipelineConfig(method=method))
    assert r.degree == 1
    assert r.phi <= PHI_FLOOR
    assert coeff_distance(r.h / r.h.lc_lc, H) <= 1e-10


def test_inputs_are_normalized():
    r = approximate_gcrd(F * 7.0, G * 0.1)
    assert dnorm(r.f) == pytest.approx(1.0) and dnorm(r.g) == pytest.approx(1.0)


def test_coprime_raises():
    with pytest.raises(AlgorithmError) as exc:
        approximate_gcrd(parse_diffpoly("D^2 + t"), parse_diffpoly("D - 1"))
    assert exc.value.kind == "coprime"


def test_denominators_rejected():
    with pytest.raises(ValueError):
        approximate_gcrd(DiffPoly([[1.0], [1.0]], den=[0.0, 1.0]), G)


def test_rational_cofactors_forced():
    f = parse_diffpoly("D^2 + t*D - 1")  # ((1/t) D + 1)(t D - 1)
    r = approximate_gcrd(f, G, PipelineConfig(cofactors="rational"))
    assert r.phi <= 1e-20
    assert coeff_distance(r.h / r.h.lc_lc, H) <= 1e-8


@pytest.mark.parametrize("seed", range(6))
def test_planted_exact(seed):
    inst = plant_instance(PlantSpec(3, 2, 1 + seed % 2, 2), 40 + seed)
    r = approximate_gcrd(inst.f_float, inst.g_float)
    assert r.phi <= 1e-18
    assert coeff_distance(r.h / r.h.lc_lc, inst.h_float) <= 1e-8


def test_trials_record_searched_structures():
    b = second_order_noisy()
    r = approximate_gcrd(b.f, b.g, PipelineConfig(epsilon_rank=1e-3))
    assert len(r.trials) >= 2
    # the final objective is the smallest one met
    assert r.phi <= min(t.phi for t in r.trials) * (1 + 1e-12)
    assert r.phi <= 1e-7


def test_no_search_keeps_initial_structure():
    b = second_order_noisy()
    r = approximate_gcrd(b.f, b.g, PipelineConfig(epsilon_rank=1e-3, search=False))
    assert len(r.trials) == 1


def test_json_keys():
    js = approximate_gcrd(F, G).to_json()
    assert {"degree", "h", "fstar", "gstar", "phi", "initial_phi", "iterations", "converged", "structures"} <= set(js)


def test_benchmark_registry():
    assert set(ALL) == {"three_factor_exact", "three_factor_noisy", "second_order_noisy"}
    b = three_factor_exact()
    # the transcribed inputs are the exact GCRD times cofactors up to rounding
    assert b.exact_h.order == 3 and b.f.order == 5 and b.g.order == 5
    assert np.isclose(b.exact_h.lc_lc, 1.0)
