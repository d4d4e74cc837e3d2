"""Noise-scaling experiments on planted instances.

Each trial plants ``f = a h``, ``g = b h`` with known GCRD, normalizes the
pair, perturbs it with relative noise and runs the full pipeline.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import AlgorithmError
from .oracle import PlantSpec, plant_instance
from .ore import DiffPoly
from .pipeline import PipelineConfig, approximate_gcrd
from .polynomial import Poly

# (D-degree, t-degree) of the inputs and of the planted GCRD, per table row
PROFILES: dict[str, list[tuple[tuple[int, int], tuple[int, int]]]] = {
    "balanced": [((2, 2), (1, 1)), ((3, 2), (2, 1)), ((3, 4), (2, 2)), ((4, 4), (3, 2))],
    "unbalanced-d": [((k, 2), (k - 1, 1)) for k in range(2, 7)],
    "unbalanced-t": [((2, 3), (1, 2)), ((2, 6), (1, 4)), ((2, 8), (1, 6)), ((2, 11), (1, 8)), ((2, 13), (1, 10))],
}

CSV_FIELDS = (
    "degrees_input",
    "degrees_gcrd",
    "noise",
    "initial_error",
    "newton_error",
    "status",
    "iterations",
    "wall_time_ms",
)


# noise singular values of the inflated matrix sit a few times above the
# coefficient noise, because every coefficient is repeated along a diagonal
NOISE_FACTOR = 30.0


def default_epsilon_rank(noise: float) -> float:
    """``NOISE_FACTOR`` times the noise level, or 1e-9 for exact data."""
    return NOISE_FACTOR * noise if noise > 0 else 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    profile: str = "balanced"
    input_degrees: tuple[int, int] = (2, 2)  # (D-degree, t-degree) of f and g
    gcrd_degrees: tuple[int, int] = (1, 1)
    noise: float = 0.0
    trials: int = 10
    seed: int = 0
    epsilon_rank: float | None = None  # None: default_epsilon_rank(noise)
    newton_iters: int = 50
    method: str = "nearby"

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {sorted(PROFILES)}")
        if not self.noise >= 0:
            raise ValueError("noise must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        (M, d), (D, dh) = self.input_degrees, self.gcrd_degrees
        if not (0 <= D <= M and 0 <= dh <= d):
            raise ValueError("GCRD degrees must not exceed the input degrees")

    @classmethod
    def from_row(cls, profile: str, row: int, **kw) -> "ExperimentConfig":
        inp, gc = PROFILES[profile][row]
        return cls(profile=profile, input_degrees=inp, gcrd_degrees=gc, **kw)

    @property
    def rank_threshold(self) -> float:
        return self.epsilon_rank if self.epsilon_rank is not None else default_epsilon_rank(self.noise)

    @property
    def plant_spec(self) -> PlantSpec:
        (M, d), (D, dh) = self.input_degrees, self.gcrd_degrees
        return PlantSpec(M, M, D, d, dh)


@dataclass(frozen=True)
class TrialRecord:
    degrees_input: tuple[int, int]
    degrees_gcrd: tuple[int, int]
    noise: float
    initial_error: float | None
    newton_error: float | None
    status: str
    iterations: int
    wall_time_ms: float
    error: str | None = field(default=None, compare=False)

    def row(self) -> dict:
        def fmt(x: float | None) -> str:
            return "" if x is None else repr(float(x))

        return {
            "degrees_input": "({},{})".format(*self.degrees_input),
            "degrees_gcrd": "({},{})".format(*self.degrees_gcrd),
            "noise": repr(float(self.noise)),
            "initial_error": fmt(self.initial_error),
            "newton_error": fmt(self.newton_error),
            "status": self.status,
            "iterations": str(self.iterations),
            "wall_time_ms": f"{self.wall_time_ms:.3f}",
        }


def inject_noise(f: DiffPoly, level: float, seed: int | np.random.Generator = 0) -> DiffPoly:
    """``f + E`` with ``E`` random on the support of ``f`` and ``||E|| = level``.

    Only coefficients that are nonzero in ``f`` are perturbed, so the degree
    vector is unchanged.
    """
    if level < 0:
        raise ValueError("noise level must be nonnegative")
    if level == 0 or f.is_zero():
        return f
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pert = []
    for c in f.coeffs:
        a = np.asarray(c.coeffs, dtype=float)
        pert.append(np.where(a != 0.0, rng.standard_normal(a.shape), 0.0))
    scale = level / float(np.sqrt(sum(float(p @ p) for p in pert)))
    return DiffPoly([Poly(np.asarray(c.coeffs, dtype=float) + scale * p) for c, p in zip(f.coeffs, pert)], f.den)


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def run_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    rng = _trial_rng(cfg.seed, index)
    start = time.perf_counter()
    initial = final = None
    iters = 0
    status, err = "ok", None
    try:
        inst = plant_instance(cfg.plant_spec, rng)
        f = inject_noise(inst.f_float.normalized(), cfg.noise, rng)
        g = inject_noise(inst.g_float.normalized(), cfg.noise, rng)
        res = approximate_gcrd(
            f, g, PipelineConfig(epsilon_rank=cfg.rank_threshold, method=cfg.method, newton_iters=cfg.newton_iters)
        )
        initial, final, iters = res.initial_phi, res.phi, res.refined.iterations
        if not np.isfinite(final) or res.h.order != cfg.gcrd_degrees[0]:
            status, final = "fail", None
            err = "wrong_degree" if np.isfinite(res.phi) else "divergence"
    except AlgorithmError as exc:
        status, err = "fail", exc.kind
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        status, err = "fail", type(exc).__name__
    ms = 1e3 * (time.perf_counter() - start)
    return TrialRecord(cfg.input_degrees, cfg.gcrd_degrees, cfg.noise, initial, final, status, iters, ms, err)


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]

    @property
    def success_rate(self) -> float:
        return sum(r.status == "ok" for r in self.records) / len(self.records)

    def median(self, column: str) -> float | None:
        vals = [getattr(r, column) for r in self.records if r.status == "ok" and getattr(r, column) is not None]
        return statistics.median(vals) if vals else None

    def summary(self) -> dict:
        return {
            "profile": self.config.profile,
            "degrees_input": list(self.config.input_degrees),
            "degrees_gcrd": list(self.config.gcrd_degrees),
            "noise": self.config.noise,
            "trials": len(self.records),
            "success_rate": self.success_rate,
            "median_initial_error": self.median("initial_error"),
            "median_newton_error": self.median("newton_error"),
            "failures": sorted({r.error for r in self.records if r.error}),
        }

    def to_csv(self) -> str:
        return records_to_csv(self.records)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run ``cfg.trials`` independent trials; trial ``i`` uses random substream ``i``."""
    return ExperimentResult(cfg, [run_trial(cfg, i) for i in range(cfg.trials)])


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(records: Iterable[TrialRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


__all__ = [
    "CSV_FIELDS",
    "PROFILES",
    "ExperimentConfig",
    "ExperimentResult",
    "TrialRecord",
    "default_epsilon_rank",
    "inject_noise",
    "records_to_csv",
    "run_experiment",
    "run_trial",
    "write_csv",
]
