"""End-to-end approximate GCRD: initial guess, co-factors, Newton refinement.

The degree structure of ``h`` chosen by the subspace solve can be off
when the inputs are noisy. After the first refinement the uniform
structures met while removing content are refined too, and any that
improves the objective by more than a factor ``KAPPA`` is adopted. The
structure is then raised step by step (one slot, or all slots together) while that lowers
the refined objective by more than a factor ``KAPPA``, and then lowered
step by step while the objective stays within ``KAPPA`` of the best value
seen.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .division import right_divide_ls
from .errors import AlgorithmError
from .gcrd import GcrdResult, LeastSquaresGcrd, NearbyResult, nearby_with_gcrd, numeric_gcrd
from .optimize import NewtonResult, modified_newton_refine, newton_refine
from .ore import DiffPoly, deg_vec, dnorm

METHODS = ("nearby", "ls", "svd")
COFACTORS = ("auto", "polynomial", "rational")
# a smaller structure is kept while its refined objective is within KAPPA of the best
KAPPA = 10.0
# objectives below this are treated as exact and end the structure search
PHI_FLOOR = 1e-24


@dataclass(frozen=True)
class PipelineConfig:
    epsilon_rank: float = 1e-9
    method: str = "nearby"
    newton_iters: int = 50
    tol: float = 1e-14
    search: bool = True
    cofactors: str = "auto"
    degree: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.cofactors not in COFACTORS:
            raise ValueError(f"cofactors must be one of {COFACTORS}")
        if not self.epsilon_rank > 0:
            raise ValueError("epsilon_rank must be positive")
        if self.newton_iters < 0:
            raise ValueError("newton_iters must be nonnegative")


@dataclass(frozen=True)
class StructureTrial:
    degrees: tuple[int, ...]
    initial_phi: float
    phi: float


@dataclass(frozen=True)
class PipelineResult:
    f: DiffPoly  # normalized inputs
    g: DiffPoly
    guess: GcrdResult
    refined: NewtonResult
    trials: list[StructureTrial]
    nearby: NearbyResult | None = field(default=None, repr=False)

    @property
    def h(self) -> DiffPoly:
        return self.refined.h

    @property
    def degree(self) -> int:
        return self.guess.degree

    @property
    def phi(self) -> float:
        return self.refined.phi

    @property
    def initial_phi(self) -> float:
        return self.refined.initial_phi

    def to_json(self) -> dict:
        out = {
            "degree": self.degree,
            "h": self.h.to_json(),
            "fstar": self.refined.fstar.to_json(),
            "gstar": self.refined.gstar.to_json(),
            "initial_phi": self.initial_phi,
            "phi": self.phi,
            "iterations": self.refined.iterations,
            "converged": self.refined.converged,
            "h_guess": self.guess.h.to_json() if self.guess.h is not None else None,
            "structures": [
                {"degrees": list(t.degrees), "initial_phi": t.initial_phi, "phi": t.phi} for t in self.trials
            ],
        }
        return out


def _int_degrees(h: DiffPoly) -> list[int]:
    return [max(int(dg), 0) if dg != float("-inf") else 0 for dg in deg_vec(h)]


def _moves(degrees: list[int]) -> list[list[int]]:
    """Lower one slot, or every positive slot together (drops a t-content factor)."""
    out = [degrees[:i] + [degrees[i] - 1] + degrees[i + 1 :] for i in range(len(degrees)) if degrees[i] > 0]
    if sum(1 for x in degrees if x > 0) > 1:
        out.append([x - 1 if x > 0 else x for x in degrees])
    return out


def _up_moves(degrees: list[int], caps: list[int]) -> list[list[int]]:
    """Raise one slot, or every slot together, within ``caps``."""
    n = len(degrees)
    out = [degrees[:i] + [degrees[i] + 1] + degrees[i + 1 :] for i in range(n) if degrees[i] < caps[i]]
    if n > 1 and all(x < c for x, c in zip(degrees, caps)):
        out.append([x + 1 for x in degrees])
    return out


def _needs_rational(f: DiffPoly, g: DiffPoly, h: DiffPoly, eps: float) -> bool:
    hn = h / dnorm(h)
    return any(right_divide_ls(x, hn, eps=eps).den_degree > 0 for x in (f, g))


def approximate_gcrd(f: DiffPoly, g: DiffPoly, config: PipelineConfig | None = None) -> PipelineResult:
    """Approximate GCRD of ``f`` and ``g`` (normalized to unit norm first).

    Raises :class:`AlgorithmError` with kind ``"coprime"`` when no nontrivial
    GCRD is found at ``epsilon_rank``.
    """
    cfg = config or PipelineConfig()
    if f.has_den() or g.has_den():
        raise ValueError("clear denominators first")
    f, g = f.normalized(), g.normalized()
    eps = cfg.epsilon_rank
    nearby = None
    solver: LeastSquaresGcrd | None = None
    try:
        if cfg.method == "nearby":
            nearby = nearby_with_gcrd(f, g, eps, degree=cfg.degree)
            guess, solver = nearby.gcrd, nearby.solver
        elif cfg.method == "ls":
            solver = LeastSquaresGcrd(f, g, eps, degree=cfg.degree)
            guess = solver.solve(solver.search_degrees()) if not solver.coprime else numeric_gcrd(f, g, eps)
        else:
            guess = numeric_gcrd(f, g, eps, degree=cfg.degree)
    except AlgorithmError as exc:
        # the least-squares solve needs h itself in the polynomial row space;
        # when only a multiple c(t) h is, the content division of the
        # null-vector method still recovers h
        if exc.kind != "ill_conditioned" or cfg.method == "svd":
            raise
        nearby, solver = None, None
        guess = numeric_gcrd(f, g, eps, degree=cfg.degree)
    if guess.coprime:
        raise AlgorithmError("coprime", "coprime within search radius", rank_report=guess.rank_report)

    rational = cfg.cofactors == "rational" or (cfg.cofactors == "auto" and _needs_rational(f, g, guess.h, eps))

    def run(h: DiffPoly) -> NewtonResult:
        if rational:
            return modified_newton_refine(f, g, h, cfg.newton_iters, cfg.tol, eps)
        return newton_refine(f, g, h, cfg.newton_iters, cfg.tol)

    best = run(guess.h)
    current = _int_degrees(guess.h)
    trials = [StructureTrial(tuple(current), best.initial_phi, best.phi)]
    phi_min = best.phi
    if cfg.search and best.phi > PHI_FLOOR:
        if solver is None:
            solver = LeastSquaresGcrd(f, g, eps, degree=guess.degree)
            solver.search_degrees()
        caps = [solver.cb - 1] * len(current)
        caps[-1] = max(min(caps[-1], solver.lead_cap), current[-1])

        def evaluate(structures: list[list[int]]) -> tuple[float, list[int], NewtonResult] | None:
            nonlocal phi_min
            cands = []
            for trial in structures:
                try:
                    res = run(solver.solve(trial).h)
                except (AlgorithmError, ValueError, ZeroDivisionError):
                    continue
                trials.append(StructureTrial(tuple(trial), res.initial_phi, res.phi))
                phi_min = min(phi_min, res.phi)
                cands.append((res.phi, trial, res))
            return min(cands, key=lambda c: c[0]) if cands else None

        anchors = [solver.uniform_degrees(b) for b in solver.content_bounds]
        anchors = [a for i, a in enumerate(anchors) if a != current and a not in anchors[:i] and a[-1] >= 0]
        alt = evaluate(anchors)
        if alt is not None and alt[0] * KAPPA < best.phi:
            _, current, best = alt
        while best.phi > PHI_FLOOR:
            top = evaluate(_up_moves(current, caps))
            if top is None or top[0] * KAPPA >= best.phi:
                break
            _, current, best = top
        while best.phi > PHI_FLOOR:
            low = evaluate(_moves(current))
            if low is None or low[0] > max(KAPPA * phi_min, PHI_FLOOR):
                break
            _, current, best = low
    return PipelineResult(f, g, guess, best, trials, nearby)
