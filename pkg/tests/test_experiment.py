import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import diffpolys
from ore_gcrd.experiment import (
    CSV_FIELDS,
    PROFILES,
    ExperimentConfig,
    default_epsilon_rank,
    inject_noise,
    records_to_csv,
    run_experiment,
    run_trial,
)
from ore_gcrd.ore import DiffPoly, deg_vec, dnorm


class TestInjectNoise:
    @given(diffpolys(ints=False), st.floats(1e-12, 1e-1), st.integers(0, 2**32 - 1))
    def test_norm_and_support(self, f, level, seed):
        g = inject_noise(f, level, seed)
        assert dnorm(g - f) == pytest.approx(level, rel=1e-6)
        assert deg_vec(g) == deg_vec(f)
        # zero coefficients of f stay zero
        for a, b in zip(f.coeffs, g.coeffs):
            assert np.all(np.asarray(b.coeffs)[np.asarray(a.coeffs) == 0] == 0)

    def test_zero_level_is_identity(self):
        f = DiffPoly([[1.0, 2.0], [3.0]])
        assert inject_noise(f, 0.0) is f

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            inject_noise(DiffPoly([[1.0]]), -1.0)

    def test_seeded(self):
        f = DiffPoly([[1.0, 2.0], [3.0]])
        assert inject_noise(f, 1e-3, 5) == inject_noise(f, 1e-3, 5)
        assert inject_noise(f, 1e-3, 5) != inject_noise(f, 1e-3, 6)


class TestConfig:
    def test_default_epsilon(self):
        assert default_epsilon_rank(0.0) == 1e-9
        assert default_epsilon_rank(1e-4) == pytest.approx(3e-3)
        assert ExperimentConfig(noise=1e-5).rank_threshold == pytest.approx(3e-4)
        assert ExperimentConfig(noise=1e-5, epsilon_rank=1e-2).rank_threshold == 1e-2

    @pytest.mark.parametrize(
        "kw",
        [
            {"profile": "unknown"},
            {"noise": -1.0},
            {"trials": 0},
            {"input_degrees": (2, 2), "gcrd_degrees": (3, 1)},
            {"input_degrees": (2, 1), "gcrd_degrees": (1, 2)},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)

    def test_from_row(self):
        cfg = ExperimentConfig.from_row("unbalanced-t", 2, noise=1e-8)
        assert cfg.input_degrees == (2, 8) and cfg.gcrd_degrees == (1, 6)
        assert cfg.plant_spec.M == cfg.plant_spec.N == 2

    def test_profiles_well_formed(self):
        for rows in PROFILES.values():
            for (M, d), (D, dh) in rows:
                assert 0 < D <= M and 0 <= dh <= d


class TestRun:
    cfg = ExperimentConfig(noise=1e-6, trials=3, seed=11)

    def test_deterministic(self):
        a, b = run_experiment(self.cfg), run_experiment(self.cfg)
        assert [r.newton_error for r in a.records] == [r.newton_error for r in b.records]

    def test_trials_independent_of_count(self):
        # trial i draws from its own substream
        more = run_experiment(ExperimentConfig(noise=1e-6, trials=4, seed=11))
        assert run_trial(self.cfg, 2).newton_error == more.records[2].newton_error

    def test_summary(self):
        res = run_experiment(self.cfg)
        s = res.summary()
        assert s["trials"] == 3 and s["success_rate"] == 1.0
        assert s["median_newton_error"] <= s["median_initial_error"]

    def test_csv_schema(self):
        text = records_to_csv(run_experiment(self.cfg).records)
        rows = list(csv.DictReader(io.StringIO(text)))
        assert tuple(rows[0].keys()) == CSV_FIELDS
        assert len(rows) == 3
        assert rows[0]["degrees_input"] == "(2,2)" and rows[0]["status"] == "ok"
        assert float(rows[0]["newton_error"]) >= 0.0

    def test_failed_trial_has_empty_error(self):
        # a rank threshold far above the data makes every pair look coprime
        rec = run_trial(ExperimentConfig(noise=0.0, trials=1, epsilon_rank=10.0), 0)
        assert rec.status == "fail" and rec.error is not None
        assert rec.row()["newton_error"] == ""
