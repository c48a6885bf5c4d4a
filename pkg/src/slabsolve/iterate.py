"""
Fixed-point schemes for ``-Δu = λ(x) f(u) + h(x)``, ``u = 0`` on the boundary.

All schemes share one step: given ``u_k``, solve the linear Dirichlet
problem ``-Δu_{k+1} = λ f(u_k) + h``.  They differ in where they start and
what they guarantee:

* ``iterate_contraction`` starts from ``u_0 = solve(h)`` and needs the
  contraction condition ``c Λ M <= 1 - θ``; differences shrink at least
  geometrically with ratio ``1 - θ``.
* ``iterate_monotone`` needs ``λ, h >= 0`` and ``f`` nonnegative and
  nondecreasing; it starts from ``solve(h)`` or from a discrete subsolution
  and produces pointwise nondecreasing iterates.
* ``iterate_system`` runs the coupled monotone scheme
  ``-Δu_{k+1} = λ_u f_u(v_k) + h_u``, ``-Δv_{k+1} = λ_v f_v(u_k) + h_v``.

Iterations stop once the sup-norm difference of successive iterates drops
to ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import contraction_hypothesis, holder_bound, max_principle_constant, sublinear_feasible
from .domain import Field, Grid, as_values
from .errors import ConvergenceError, HypothesisError, MonotonicityError, SubsolutionError
from .nonlinearity import Nonlinearity
from .poisson import DEFAULT_TOL, DiscreteLaplacian, assemble_laplacian, poisson_solve
from .subsolution import SUBSOLUTION_TOL

__all__ = [
    "Problem",
    "IterationReport",
    "iterate_contraction",
    "iterate_monotone",
    "iterate_system",
    "residual",
    "fit_rate",
    "DEFAULT_ITER_TOL",
]

DEFAULT_ITER_TOL = 1e-8
BOUND_RTOL = 1e-6


@dataclass(eq=False)
class Problem:
    """Discrete BVP data on one grid.

    ``lam`` and ``h`` accept a constant, an array of node values, a Field
    or a callable evaluated on the grid.  Pass ``op`` to share an assembled
    (and factorized) Laplacian between problems on the same grid.
    """

    grid: Grid
    f: Nonlinearity
    lam: object = 1.0
    h: object = 0.0
    op: DiscreteLaplacian | None = None

    def __post_init__(self):
        self.lam = np.array(as_values(self.lam, self.grid), dtype=float)
        self.h = np.array(as_values(self.h, self.grid), dtype=float)
        if self.op is None:
            self.op = assemble_laplacian(self.grid)
        elif self.op.grid.n_unknowns != self.grid.n_unknowns:
            raise ValueError("operator and problem live on different grids")

    @property
    def lam_norm(self) -> float:
        return float(np.max(np.abs(self.lam), initial=0.0))

    @property
    def h_norm(self) -> float:
        return float(np.max(np.abs(self.h), initial=0.0))

    def source(self, arg) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.lam * self.f(arg) + self.h

    def max_principle_c(self) -> float:
        return max_principle_constant(self.grid.domain, improved=True).c


@dataclass
class IterationReport:
    scheme: str
    sup_norms: list = field(default_factory=list)
    differences: list = field(default_factory=list)
    residual: float = math.nan
    min_increment: float | None = None
    monotone: bool | None = None
    converged: bool = False
    predicted_bound: float | None = None
    bound_source: str | None = None
    bound_respected: bool | None = None
    fitted_rate: float | None = None
    checks: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.differences)

    @property
    def ratios(self) -> list:
        d = self.differences
        return [d[k] / d[k - 1] for k in range(1, len(d)) if d[k - 1] > 0]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["iterations"] = self.iterations
        return out


def residual(problem: Problem, u, arg=None) -> float:
    """Sup norm of ``-Δ_h u - λ f(arg) - h`` over the unknowns (``arg`` defaults to ``u``)."""
    u = as_values(u, problem.grid)
    arg = u if arg is None else as_values(arg, problem.grid)
    r = problem.op.apply(u) - problem.source(arg)
    return float(np.max(np.abs(r), initial=0.0))


def fit_rate(differences, floor: float = 0.0) -> float | None:
    """Geometric decay ratio from a least-squares fit of log differences.

    The first difference and values at or below ``floor`` are ignored.
    """
    d = np.asarray(differences, dtype=float)
    k = np.arange(d.size)
    keep = (k >= 1) & (d > floor) & np.isfinite(d)
    if np.count_nonzero(keep) < 2:
        return None
    slope = np.polyfit(k[keep], np.log(d[keep]), 1)[0]
    return float(math.exp(slope))


def _solve(problem, g, c, solve_tol):
    u, _ = poisson_solve(problem.op, g, tol=solve_tol, c=c)
    return u.values


def _noise_floor(u):
    return 1e3 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(u), initial=0.0)))


def iterate_contraction(problem: Problem, theta: float = 0.5, tol: float = DEFAULT_ITER_TOL,
                        max_iter: int = 1000, force: bool = False, c: float | None = None,
                        solve_tol: float = DEFAULT_TOL):
    """Contraction scheme from ``u_0 = solve(h)``.

    Raises
    ------
    HypothesisError
        If ``c Λ M > 1 - θ`` and ``force`` is false.
    ConvergenceError
        If ``max_iter`` is exhausted or the iterates blow up.
    """
    c = problem.max_principle_c() if c is None else c
    hyp = contraction_hypothesis(problem.f, problem.lam_norm, problem.h_norm, c, theta)
    if not hyp.satisfied and not force:
        raise HypothesisError(
            f"contraction condition fails: c*Lambda*M = {c * hyp.lam * hyp.M:.6g} > 1 - theta = {1 - theta:.6g}",
            hyp,
        )
    report = IterationReport("contraction")
    report.extra["hypothesis"] = asdict(hyp)
    report.extra["forced"] = bool(force and not hyp.satisfied)

    u = _solve(problem, problem.h, c, solve_tol)
    report.sup_norms.append(float(np.max(np.abs(u), initial=0.0)))
    for _ in range(max_iter):
        g = problem.source(u)
        if not np.all(np.isfinite(g)):
            raise ConvergenceError("contraction iterates diverged", report)
        u_new = _solve(problem, g, c, solve_tol)
        diff = float(np.max(np.abs(u_new - u), initial=0.0))
        u = u_new
        report.sup_norms.append(float(np.max(np.abs(u), initial=0.0)))
        report.differences.append(diff)
        if diff <= tol:
            report.converged = True
            break
    else:
        raise ConvergenceError(f"no convergence to {tol:.1e} in {max_iter} iterations", report)

    report.residual = residual(problem, u)
    report.fitted_rate = fit_rate(report.differences, _noise_floor(u))
    report.predicted_bound = hyp.a_priori_bound
    report.bound_source = "contraction"
    report.bound_respected = report.sup_norms[-1] <= hyp.a_priori_bound * (1 + BOUND_RTOL)
    ratios = [r for k, r in enumerate(report.ratios, start=2) if report.differences[k - 1] > _noise_floor(u)]
    report.checks["rate_within_1_minus_theta"] = all(r <= (1 - theta) + 0.05 for r in ratios)
    if hyp.satisfied:
        report.checks["a_priori_bound"] = report.bound_respected
    return Field(problem.grid, u), report


def _require_monotone_data(problem: Problem):
    if np.min(problem.lam, initial=0.0) < 0:
        raise HypothesisError("monotone iteration needs lambda >= 0")
    if np.min(problem.h, initial=0.0) < 0:
        raise HypothesisError("monotone iteration needs h >= 0")
    if not (problem.f.nonnegative and problem.f.nondecreasing):
        raise HypothesisError(f"monotone iteration needs f nonnegative and nondecreasing ({problem.f.name})")


def _check_seed(problem: Problem, seed, arg, label):
    excess = problem.op.apply(seed) - problem.source(arg)
    worst = float(np.max(excess, initial=-math.inf))
    if worst > SUBSOLUTION_TOL:
        k = int(np.argmax(excess))
        node = tuple(float(x) for x in problem.grid.points()[k])
        raise SubsolutionError(f"{label} is not a discrete subsolution: excess {worst:.3e} at {node}", worst, node)
    return worst


def _predicted_bound(problem: Problem, c: float):
    f = problem.f
    if f.growth is not None:
        K, p = f.growth
        hyp = sublinear_feasible(c, problem.lam_norm, K, p, problem.h_norm)
        if hyp.satisfied:
            return hyp.bound, f"sublinear:{hyp.regime}"
    if f.holder is not None:
        return holder_bound(c, problem.lam_norm, f, problem.h_norm), "holder"
    return None, None


def iterate_monotone(problem: Problem, seed=None, tol: float = DEFAULT_ITER_TOL, max_iter: int = 1000,
                     c: float | None = None, solve_tol: float = DEFAULT_TOL):
    """Monotone scheme from ``solve(h)`` (``seed=None``) or from a discrete subsolution.

    Raises
    ------
    HypothesisError
        If λ or h is negative somewhere or f is not nonnegative nondecreasing.
    SubsolutionError
        If ``seed`` violates ``-Δ_h seed <= λ f(seed) + h``.
    MonotonicityError
        If an iterate decreases by more than ``10 tol`` anywhere.
    ConvergenceError
        If ``max_iter`` is exhausted.
    """
    _require_monotone_data(problem)
    c = problem.max_principle_c() if c is None else c
    report = IterationReport("monotone")
    if seed is None:
        u = _solve(problem, problem.h, c, solve_tol)
        seed_values = u.copy()
    else:
        seed_values = np.array(as_values(seed, problem.grid), dtype=float)
        report.extra["seed_excess"] = _check_seed(problem, seed_values, seed_values, "seed")
        u = seed_values.copy()

    report.sup_norms.append(float(np.max(np.abs(u), initial=0.0)))
    min_inc = math.inf
    for _ in range(max_iter):
        u_new = _solve(problem, problem.source(u), c, solve_tol)
        step = u_new - u
        inc = float(np.min(step, initial=math.inf))
        min_inc = min(min_inc, inc)
        report.min_increment = min_inc
        if not np.all(np.isfinite(u_new)):
            raise ConvergenceError("monotone iterates diverged", report)
        if inc < -10 * tol:
            report.monotone = False
            raise MonotonicityError(f"iterate decreased by {-inc:.3e} (tolerance {10 * tol:.1e})", report)
        diff = float(np.max(np.abs(step), initial=0.0))
        u = u_new
        report.sup_norms.append(float(np.max(np.abs(u), initial=0.0)))
        report.differences.append(diff)
        if diff <= tol:
            report.converged = True
            break
    else:
        raise ConvergenceError(f"no convergence to {tol:.1e} in {max_iter} iterations", report)

    report.monotone = True
    report.residual = residual(problem, u)
    report.fitted_rate = fit_rate(report.differences, _noise_floor(u))
    report.checks["above_seed"] = bool(np.min(u - seed_values, initial=0.0) >= -10 * tol)
    bound, source = _predicted_bound(problem, c)
    if bound is not None:
        report.predicted_bound = bound
        report.bound_source = source
        report.bound_respected = report.sup_norms[-1] <= bound * (1 + BOUND_RTOL)
        report.checks["a_priori_bound"] = report.bound_respected
    return Field(problem.grid, u), report


def _system_constant(problem_u, problem_v, c):
    """Constant ``C`` of the coupled a priori estimate, or None without Hölder data."""
    if problem_u.f.holder is None or problem_v.f.holder is None:
        return None
    return 2 * c * max(problem_u.lam_norm * problem_u.f.holder[1], problem_v.lam_norm * problem_v.f.holder[1])


def iterate_system(problem_u: Problem, problem_v: Problem, seed_u=None, seed_v=None,
                   tol: float = DEFAULT_ITER_TOL, max_iter: int = 1000, c: float | None = None,
                   force: bool = False, solve_tol: float = DEFAULT_TOL):
    """Coupled monotone scheme ``-Δu = λ_u f_u(v) + h_u``, ``-Δv = λ_v f_v(u) + h_v``.

    Both problems must live on the same grid.  Each iterate is checked
    against the coupled estimate

        ||u_{k+1} - u_1|| + ||v_{k+1} - v_1|| <= C (2 + ||u_k - u_0|| + ||v_k - v_0||)^s

    with ``s`` the larger growth exponent and ``C = 2 c max(Λ [f]_α)``.

    Returns
    -------
    u, v : Field
    reports : (IterationReport, IterationReport)
    """
    if problem_u.grid.n_unknowns != problem_v.grid.n_unknowns:
        raise ValueError("system components must share a grid")
    _require_monotone_data(problem_u)
    _require_monotone_data(problem_v)
    exponents = [pr.f.growth[1] for pr in (problem_u, problem_v) if pr.f.growth is not None]
    s = max(exponents) if len(exponents) == 2 else None
    if (s is None or s > 0.5) and not force:
        raise HypothesisError("system iteration needs power-type growth with exponents <= 1/2")
    c = problem_u.max_principle_c() if c is None else c
    C = _system_constant(problem_u, problem_v, c)

    rep_u, rep_v = IterationReport("system-u"), IterationReport("system-v")
    if seed_u is None:
        u = _solve(problem_u, problem_u.h, c, solve_tol)
    else:
        u = np.array(as_values(seed_u, problem_u.grid), dtype=float)
    if seed_v is None:
        v = _solve(problem_v, problem_v.h, c, solve_tol)
    else:
        v = np.array(as_values(seed_v, problem_v.grid), dtype=float)
    if seed_u is not None or seed_v is not None:
        rep_u.extra["seed_excess"] = _check_seed(problem_u, u, v, "seed_u")
        rep_v.extra["seed_excess"] = _check_seed(problem_v, v, u, "seed_v")
    u0, v0 = u.copy(), v.copy()
    u1 = v1 = None
    estimate_ok = True
    worst_estimate = -math.inf

    for rep, x in ((rep_u, u), (rep_v, v)):
        rep.sup_norms.append(float(np.max(np.abs(x), initial=0.0)))
    min_u = min_v = math.inf
    for k in range(max_iter):
        u_new = _solve(problem_u, problem_u.source(v), c, solve_tol)
        v_new = _solve(problem_v, problem_v.source(u), c, solve_tol)
        du, dv = u_new - u, v_new - v
        min_u = min(min_u, float(np.min(du, initial=math.inf)))
        min_v = min(min_v, float(np.min(dv, initial=math.inf)))
        rep_u.min_increment, rep_v.min_increment = min_u, min_v
        if min(min_u, min_v) < -10 * tol:
            rep_u.monotone = min_u >= -10 * tol
            rep_v.monotone = min_v >= -10 * tol
            raise MonotonicityError(f"system iterate decreased by {-min(min_u, min_v):.3e}", (rep_u, rep_v))
        if k == 0:
            u1, v1 = u_new.copy(), v_new.copy()
        elif C is not None:
            lhs = np.max(np.abs(u_new - u1)) + np.max(np.abs(v_new - v1))
            rhs = C * (2 + np.max(np.abs(u - u0)) + np.max(np.abs(v - v0))) ** s
            worst_estimate = max(worst_estimate, float(lhs / rhs))
            estimate_ok = estimate_ok and lhs <= rhs * (1 + BOUND_RTOL)
        diff_u = float(np.max(np.abs(du), initial=0.0))
        diff_v = float(np.max(np.abs(dv), initial=0.0))
        u, v = u_new, v_new
        rep_u.sup_norms.append(float(np.max(np.abs(u), initial=0.0)))
        rep_v.sup_norms.append(float(np.max(np.abs(v), initial=0.0)))
        rep_u.differences.append(diff_u)
        rep_v.differences.append(diff_v)
        if max(diff_u, diff_v) <= tol:
            rep_u.converged = rep_v.converged = True
            break
    else:
        raise ConvergenceError(f"system did not converge to {tol:.1e} in {max_iter} iterations", (rep_u, rep_v))

    rep_u.residual = residual(problem_u, u, v)
    rep_v.residual = residual(problem_v, v, u)
    for rep, x, x0 in ((rep_u, u, u0), (rep_v, v, v0)):
        rep.monotone = True
        rep.fitted_rate = fit_rate(rep.differences, _noise_floor(x))
        rep.checks["above_seed"] = bool(np.min(x - x0, initial=0.0) >= -10 * tol)
        if C is not None:
            rep.checks["coupled_estimate"] = bool(estimate_ok)
            rep.extra["coupled_estimate_worst_ratio"] = worst_estimate
            rep.extra["coupled_estimate_C"] = C
    return Field(problem_u.grid, u), Field(problem_v.grid, v), (rep_u, rep_v)
