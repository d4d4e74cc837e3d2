"""Approximate greatest common right divisors of differential operators."""

from .division import QuotientResult, right_divide_ls, right_divide_naive
from .embed import SylvesterEmbed, embed, lconv, rconv, sylvester
from .errors import AlgorithmError
from .experiment import ExperimentConfig, TrialRecord, inject_noise, run_experiment
from .gcrd import GcrdResult, NearbyResult, gcrd_via_ls, nearby_with_gcrd, numeric_gcrd
from .optimize import NewtonResult, modified_newton_refine, newton_refine
from .ore import DiffPoly, deg_vec, dnorm, ore_mul, parse_diffpoly
from .pipeline import PipelineConfig, PipelineResult, approximate_gcrd
from .polynomial import Poly, RatFun
from .rank import RankReport, deflated_rank

__all__ = [
    "AlgorithmError",
    "DiffPoly",
    "ExperimentConfig",
    "GcrdResult",
    "NearbyResult",
    "NewtonResult",
    "PipelineConfig",
    "PipelineResult",
    "Poly",
    "QuotientResult",
    "RankReport",
    "RatFun",
    "SylvesterEmbed",
    "TrialRecord",
    "approximate_gcrd",
    "deflated_rank",
    "deg_vec",
    "dnorm",
    "embed",
    "gcrd_via_ls",
    "inject_noise",
    "lconv",
    "modified_newton_refine",
    "nearby_with_gcrd",
    "newton_refine",
    "numeric_gcrd",
    "ore_mul",
    "parse_diffpoly",
    "rconv",
    "right_divide_ls",
    "right_divide_naive",
    "run_experiment",
    "sylvester",
]

__version__ = "0.1.0"
