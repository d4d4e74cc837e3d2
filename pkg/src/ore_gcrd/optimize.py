"""Residual, derivatives and Newton refinement of an approximate factorization.

The unknowns are the co-factors ``f*``, ``g*`` and the common right factor
``h``, all with frozen degree structures. One coefficient of ``h`` (the
leading t-coefficient of its leading D-coefficient) is held fixed, which
removes the scaling freedom ``(a f*, a g*, h / a)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .division import cofactor_degrees, right_divide_ls
from .errors import AlgorithmError
from .ore import NEG_INF, DiffPoly, Degree, deg_vec, dnorm, mul_tensor, product_degrees, slot_offsets, unvec, vec


def _cover(a: list[Degree], b: list[Degree]) -> list[Degree]:
    n = max(len(a), len(b))
    a = list(a) + [NEG_INF] * (n - len(a))
    b = list(b) + [NEG_INF] * (n - len(b))
    return [max(x, y) for x, y in zip(a, b)]


@dataclass(frozen=True)
class ResidualSystem:
    """Bilinear least-squares problem ``f ~ f* h``, ``g ~ g* h``.

    The residual runs over the coefficients of ``f`` and ``g``; if the
    chosen structures let ``f* h`` reach beyond them, those coefficients are
    compared against zero as well.
    """

    f: DiffPoly
    g: DiffPoly
    h_degrees: tuple[Degree, ...]
    fs_degrees: tuple[Degree, ...]
    gs_degrees: tuple[Degree, ...]
    normalization_constant: float
    Tf: np.ndarray = field(repr=False)
    Tg: np.ndarray = field(repr=False)
    vf: np.ndarray = field(repr=False)
    vg: np.ndarray = field(repr=False)

    @classmethod
    def build(
        cls,
        f: DiffPoly,
        g: DiffPoly,
        h_degrees: list[Degree],
        normalization_constant: float,
        fs_degrees: list[Degree] | None = None,
        gs_degrees: list[Degree] | None = None,
    ) -> "ResidualSystem":
        if f.has_den() or g.has_den():
            raise ValueError("clear denominators first")
        if h_degrees[-1] == NEG_INF:
            raise ValueError("leading coefficient of h must be nonzero")
        df, dg = list(deg_vec(f)), list(deg_vec(g))
        fs_degrees = cofactor_degrees(df, h_degrees) if fs_degrees is None else list(fs_degrees)
        gs_degrees = cofactor_degrees(dg, h_degrees) if gs_degrees is None else list(gs_degrees)
        of = _cover(df, product_degrees(fs_degrees, h_degrees))
        og = _cover(dg, product_degrees(gs_degrees, h_degrees))
        return cls(
            f, g, tuple(h_degrees), tuple(fs_degrees), tuple(gs_degrees), float(normalization_constant),
            mul_tensor(fs_degrees, h_degrees, of), mul_tensor(gs_degrees, h_degrees, og), vec(f, of), vec(g, og),
        )

    # sizes ------------------------------------------------------------------
    @property
    def eta(self) -> int:
        return len(self.vf) + len(self.vg)

    @property
    def n_fs(self) -> int:
        return self.Tf.shape[1]

    @property
    def n_gs(self) -> int:
        return self.Tg.shape[1]

    @property
    def n_h(self) -> int:
        return self.Tf.shape[2]

    @property
    def nu(self) -> int:
        """Number of coefficients including the fixed one."""
        return self.n_fs + self.n_gs + self.n_h

    @property
    def fixed_index(self) -> int:
        """Position of ``lc_t lc_D h`` inside ``vec(h)``."""
        return int(slot_offsets(self.h_degrees)[-1]) - 1

    # packing ----------------------------------------------------------------
    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.nu - 1,):
            raise ValueError(f"expected a vector of length {self.nu - 1}, got {x.shape}")
        a = x[: self.n_fs]
        b = x[self.n_fs : self.n_fs + self.n_gs]
        hv = np.insert(x[self.n_fs + self.n_gs :], self.fixed_index, self.normalization_constant)
        return a, b, hv

    def pack(self, fs: DiffPoly, gs: DiffPoly, h: DiffPoly) -> np.ndarray:
        hv = vec(h, self.h_degrees)
        return np.concatenate([vec(fs, self.fs_degrees), vec(gs, self.gs_degrees), np.delete(hv, self.fixed_index)])

    def unpack(self, x: np.ndarray) -> tuple[DiffPoly, DiffPoly, DiffPoly]:
        a, b, hv = self.split(x)
        return unvec(a, self.fs_degrees), unvec(b, self.gs_degrees), unvec(hv, self.h_degrees)


def residual(sys: ResidualSystem, x: np.ndarray) -> np.ndarray:
    """``(vec(f* h) - vec f, vec(g* h) - vec g)`` on the structure of ``f`` and ``g``."""
    a, b, hv = sys.split(x)
    rf = np.einsum("kpq,p,q->k", sys.Tf, a, hv) - sys.vf
    rg = np.einsum("kpq,p,q->k", sys.Tg, b, hv) - sys.vg
    return np.concatenate([rf, rg])


def objective_phi(sys: ResidualSystem, x: np.ndarray) -> float:
    r = residual(sys, x)
    return float(r @ r)


def _full_jacobian(sys: ResidualSystem, a: np.ndarray, b: np.ndarray, hv: np.ndarray) -> np.ndarray:
    """Jacobian with respect to all ``nu`` coefficients."""
    ef, eg = len(sys.vf), len(sys.vg)
    J = np.zeros((ef + eg, sys.nu))
    J[:ef, : sys.n_fs] = np.einsum("kpq,q->kp", sys.Tf, hv)
    J[ef:, sys.n_fs : sys.n_fs + sys.n_gs] = np.einsum("kpq,q->kp", sys.Tg, hv)
    J[:ef, sys.n_fs + sys.n_gs :] = np.einsum("kpq,p->kq", sys.Tf, a)
    J[ef:, sys.n_fs + sys.n_gs :] = np.einsum("kpq,p->kq", sys.Tg, b)
    return J


def _drop(sys: ResidualSystem) -> int:
    return sys.n_fs + sys.n_gs + sys.fixed_index


def jacobian(sys: ResidualSystem, x: np.ndarray, full: bool = False) -> np.ndarray:
    """``d residual / d x``; ``full=True`` keeps the fixed coefficient's column."""
    J = _full_jacobian(sys, *sys.split(x))
    return J if full else np.delete(J, _drop(sys), axis=1)


def gradient(sys: ResidualSystem, x: np.ndarray) -> np.ndarray:
    return 2.0 * jacobian(sys, x).T @ residual(sys, x)


def hessian(sys: ResidualSystem, x: np.ndarray) -> np.ndarray:
    """Exact Hessian ``2 J^T J + 2 sum_k r_k grad^2 r_k``.

    Each residual is bilinear, so its second derivative only couples a
    co-factor coefficient with an ``h`` coefficient.
    """
    a, b, hv = sys.split(x)
    r = residual(sys, x)
    ef = len(sys.vf)
    J = _full_jacobian(sys, a, b, hv)
    H = 2.0 * J.T @ J
    o = sys.n_fs + sys.n_gs
    Cf = 2.0 * np.einsum("k,kpq->pq", r[:ef], sys.Tf)
    Cg = 2.0 * np.einsum("k,kpq->pq", r[ef:], sys.Tg)
    H[: sys.n_fs, o:] += Cf
    H[o:, : sys.n_fs] += Cf.T
    H[sys.n_fs : o, o:] += Cg
    H[o:, sys.n_fs : o] += Cg.T
    k = _drop(sys)
    return np.delete(np.delete(H, k, axis=0), k, axis=1)


def hessian_condition(sys: ResidualSystem, x: np.ndarray) -> tuple[float, float]:
    """2-norm condition number and smallest eigenvalue of the Hessian."""
    ev = np.linalg.eigvalsh(hessian(sys, x))
    lo, hi = ev[0], np.max(np.abs(ev))
    return (float(hi / lo) if lo > 0 else float("inf")), float(lo)


def condition_bound(sys: ResidualSystem, x: np.ndarray, phi_value: float, eps: float) -> float:
    """First-order bound ``2 eps / sigma_min(J)^2`` on the squared distance
    from ``x`` to a nearby point where ``Phi <= eps`` is attained."""
    if eps < 0 or phi_value < 0:
        raise ValueError("eps and phi_value must be nonnegative")
    if phi_value > eps:
        raise ValueError("phi_value exceeds eps")
    J = jacobian(sys, x)
    s = np.linalg.svd(J, compute_uv=False)
    smin = s[-1] if J.shape[0] >= J.shape[1] else 0.0
    if smin < 1e-12:
        raise AlgorithmError("degenerate_jacobian", "degenerate Jacobian", sigma_min=float(smin))
    return 2.0 * eps / smin**2


# ---------------------------------------------------------------------------
# refinement


@dataclass(frozen=True)
class Step:
    iteration: int
    phi: float
    step_norm: float
    kind: str  # newton | gauss-newton

    def to_json(self) -> dict:
        return {"iteration": self.iteration, "phi": self.phi, "step_norm": self.step_norm, "kind": self.kind}


@dataclass(frozen=True)
class NewtonResult:
    fstar: DiffPoly
    gstar: DiffPoly
    h: DiffPoly
    phi: float
    initial_phi: float
    trace: list[Step]
    converged: bool
    system: ResidualSystem = field(repr=False)
    x: np.ndarray = field(repr=False)

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def step_norms(self) -> list[float]:
        return [s.step_norm for s in self.trace]

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "fstar": self.fstar.to_json(),
            "gstar": self.gstar.to_json(),
            "phi": self.phi,
            "initial_phi": self.initial_phi,
            "iterations": self.iterations,
            "converged": self.converged,
        }


# Levenberg damping schedule for the Gauss-Newton fallback
LM_START, LM_GROWTH, LM_MAX = 1e-8, 10.0, 1e8
MAX_STALL = 5


def _newton_step(H: np.ndarray, grad: np.ndarray) -> np.ndarray | None:
    try:
        c = scipy.linalg.cho_factor(H, check_finite=True)
    except (np.linalg.LinAlgError, ValueError):
        return None
    p = scipy.linalg.cho_solve(c, -grad)
    return p if np.all(np.isfinite(p)) else None


def refine(sys: ResidualSystem, x0: np.ndarray, max_iter: int = 50, tol: float = 1e-14) -> tuple[np.ndarray, list[Step], bool]:
    """Newton iteration on ``Phi`` from ``x0`` with a damped Gauss-Newton fallback.

    A Newton step is taken when the Hessian is positive definite and the
    step does not increase ``Phi``. Otherwise ``(2 J^T J + lam I) p = -grad``
    is solved with ``lam`` growing tenfold until ``Phi`` decreases. Stops
    after ``max_iter`` steps, when the step norm drops to ``tol``, when
    ``Phi`` fails to decrease ``MAX_STALL`` times in a row, or when no
    damping yields a decrease. ``tol`` is relative to ``max(1, ||x||)``;
    smaller steps are at the rounding level of ``x`` itself.
    """
    x = np.array(x0, dtype=float)
    phi = objective_phi(sys, x)
    best_x, best_phi = x.copy(), phi
    trace: list[Step] = []
    stall = 0
    converged = False
    for it in range(1, max_iter + 1):
        if phi == 0.0:
            converged = True
            break
        r = residual(sys, x)
        J = jacobian(sys, x)
        grad = 2.0 * J.T @ r
        p = _newton_step(hessian(sys, x), grad)
        kind = "newton"
        new_phi = objective_phi(sys, x + p) if p is not None else np.inf
        if not new_phi <= phi:
            kind = "gauss-newton"
            JTJ2 = 2.0 * J.T @ J
            lam = LM_START
            p = None
            while lam <= LM_MAX:
                try:
                    cand = scipy.linalg.solve(JTJ2 + lam * np.eye(len(x)), -grad, assume_a="pos")
                except (np.linalg.LinAlgError, ValueError):
                    cand = None
                if cand is not None:
                    trial = objective_phi(sys, x + cand)
                    if trial < phi:
                        p, new_phi = cand, trial
                        break
                lam *= LM_GROWTH
            if p is None:
                converged = True  # no descent direction left at working precision
                break
        step = float(np.linalg.norm(p))
        stall = stall + 1 if new_phi >= phi else 0
        x, phi = x + p, new_phi
        trace.append(Step(it, phi, step, kind))
        if phi < best_phi:
            best_x, best_phi = x.copy(), phi
        if step <= tol * max(1.0, float(np.linalg.norm(x))):
            converged = True
            break
        if stall >= MAX_STALL:
            break
    return best_x, trace, converged


def _unit(h: DiffPoly) -> DiffPoly:
    n = dnorm(h)
    if n == 0.0:
        raise ValueError("h_init must be nonzero")
    return h / n


def newton_refine(
    f: DiffPoly,
    g: DiffPoly,
    h_init: DiffPoly,
    max_iter: int = 50,
    tol: float = 1e-14,
    fs_init: DiffPoly | None = None,
    gs_init: DiffPoly | None = None,
) -> NewtonResult:
    """Refine ``h`` and polynomial co-factors minimising ``Phi``.

    ``h_init`` is scaled to unit norm and its ``lc_t lc_D`` is held fixed.
    Degree structures are those of ``h_init`` and the largest polynomial
    co-factors compatible with ``f`` and ``g``; initial co-factors come
    from least-squares division unless given.
    """
    h0 = _unit(h_init)
    hd = list(deg_vec(h0))
    sys = ResidualSystem.build(f, g, hd, h0.lc_lc)
    if fs_init is None:
        fs_init = right_divide_ls(f, h0, den_degree=0, num_degrees=list(sys.fs_degrees)).quotient
    if gs_init is None:
        gs_init = right_divide_ls(g, h0, den_degree=0, num_degrees=list(sys.gs_degrees)).quotient
    x0 = sys.pack(_fit(fs_init, sys.fs_degrees), _fit(gs_init, sys.gs_degrees), h0)
    phi0 = objective_phi(sys, x0)
    x, trace, ok = refine(sys, x0, max_iter, tol)
    fs, gs, h = sys.unpack(x)
    return NewtonResult(fs, gs, h, objective_phi(sys, x), phi0, trace, ok, sys, x)


def _fit(q: DiffPoly, degrees: tuple[Degree, ...]) -> DiffPoly:
    """Truncate ``q`` to a degree structure (co-factor initial guesses)."""
    if q.has_den():
        raise ValueError("polynomial co-factor expected")
    return DiffPoly([q[i].truncate(dg) for i, dg in enumerate(degrees)])


def modified_newton_refine(
    f: DiffPoly,
    g: DiffPoly,
    h_init: DiffPoly,
    max_iter: int = 50,
    tol: float = 1e-14,
    eps: float = 1e-8,
) -> NewtonResult:
    """Newton refinement allowing rational co-factors ``f* = v / v_{-1}``.

    The co-factor denominators from least-squares division are frozen;
    ``v_{-1} f = v h`` and the analogous equation for ``g`` are refined as
    polynomial problems, and the co-factors are divided back at the end.
    ``phi`` is reported per cleared equation, scaled by the denominator norm.
    """
    h0 = _unit(h_init)
    qf = right_divide_ls(f, h0, eps=eps).quotient
    qg = right_divide_ls(g, h0, eps=eps).quotient
    cf, cg = qf.den, qg.den
    for c in (cf, cg):
        if c.norm() < 1e-12:
            raise AlgorithmError("vanishing_denominator", "co-factor denominator estimate vanishes")
    F, G = cf * f, cg * g
    hd = list(deg_vec(h0))
    sys = ResidualSystem.build(F, G, hd, h0.lc_lc)
    x0 = sys.pack(_fit(qf.numerator(), sys.fs_degrees), _fit(qg.numerator(), sys.gs_degrees), h0)
    x, trace, ok = refine(sys, x0, max_iter, tol)
    fs, gs, h = sys.unpack(x)
    ef = len(sys.vf)

    def scaled(z: np.ndarray) -> float:
        r = residual(sys, z)
        return float((r[:ef] @ r[:ef]) / cf.norm() ** 2 + (r[ef:] @ r[ef:]) / cg.norm() ** 2)

    return NewtonResult(
        DiffPoly(fs.coeffs, cf), DiffPoly(gs.coeffs, cg), h, scaled(x), scaled(x0), trace, ok, sys, x
    )
