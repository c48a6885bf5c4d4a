"""
Problems on the unbounded slab ``|x_n| < d/2`` through nested truncations.

The slab is exhausted by ``Ω_m = slab ∩ [-m-2, m+2]^n``.  On each Ω_m the
BVP is solved with one of the iteration schemes; with nonnegative data and
nondecreasing f the truncated solutions increase with m, and all of them
obey the same bound because the maximum-principle constant ``d^2/8``
depends only on the slab width.  Convergence of the limit is observed on
the fixed window Ω_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import contraction_hypothesis, optimize_theta, sublinear_feasible
from .domain import as_values, discretize, exhaustion_family, shared_node_index
from .errors import MonotonicityError
from .iterate import DEFAULT_ITER_TOL, Problem, iterate_contraction, iterate_monotone, iterate_system
from .nonlinearity import Nonlinearity
from .poisson import assemble_laplacian, poisson_solve
from .subsolution import glued_z

__all__ = ["ExhaustionRun", "solve_on_slab", "window_convergence_report", "best_theta", "SCHEMES"]

SCHEMES = ("linear", "contraction", "monotone", "system")


@dataclass(eq=False)
class ExhaustionRun:
    d: float
    n: int
    scheme: str
    seed: str
    grids: list = field(default_factory=list)
    solutions: list = field(default_factory=list)
    partners: list = field(default_factory=list)  # v-components of system runs
    sup_norms: list = field(default_factory=list)
    window_differences: list = field(default_factory=list)
    nesting_min: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    theorem_bound: float | None = None
    theta: float | None = None
    c: float = math.nan
    tol: float = DEFAULT_ITER_TOL

    @property
    def m_values(self) -> list:
        return [g.domain.m for g in self.grids]

    @property
    def monotone_in_m(self) -> bool:
        return all(x >= -10 * self.tol for x in self.nesting_min)

    @property
    def bound_respected(self) -> bool | None:
        if self.theorem_bound is None:
            return None
        return max(self.sup_norms) <= self.theorem_bound * (1 + 1e-6)

    def window_values(self, m_index: int = -1) -> np.ndarray:
        """Solution on the unknown nodes of Ω_0, in Ω_0's grid order."""
        idx = shared_node_index(self.grids[0], self.grids[m_index])
        return self.solutions[m_index].values[idx]

    def longitudinal_variation(self, m_index: int = -1) -> float:
        """Largest spread along the longitudinal axes, over transverse positions, on Ω_0."""
        vals = self.window_values(m_index).reshape(self.grids[0].shape)
        axes = tuple(range(vals.ndim - 1))
        return float(np.max(np.max(vals, axis=axes) - np.min(vals, axis=axes)))

    def summary(self) -> dict:
        report = window_convergence_report(self)
        return {
            "d": self.d,
            "n": self.n,
            "scheme": self.scheme,
            "seed": self.seed,
            "c": self.c,
            "theta": self.theta,
            "m": self.m_values,
            "sup_norms": self.sup_norms,
            "window_differences": self.window_differences,
            "nesting_min": self.nesting_min,
            "iterations": self.iterations,
            "residuals": self.residuals,
            "theorem_bound": self.theorem_bound,
            "bound_respected": self.bound_respected,
            "monotone_in_m": self.monotone_in_m,
            "longitudinal_variation": self.longitudinal_variation(),
            "fitted_ratio": report["fitted_ratio"],
            "decays": report["decays"],
        }


def best_theta(f: Nonlinearity, lam: float, h_norm: float, c: float) -> float:
    """θ maximizing the contraction margin ``(1 - θ) - c Λ M(θ)``."""
    return optimize_theta(lambda t: contraction_hypothesis(f, lam, h_norm, c, t).margin)[0]


def _norm(x):
    return float(np.max(np.abs(x), initial=0.0))


def solve_on_slab(f: Nonlinearity | tuple | None, d: float, m_max: int, resolution: float,
                  scheme: str = "contraction", seed: str = "zero", lam=1.0, h=0.0,
                  tol: float = DEFAULT_ITER_TOL, theta: float | None = None, n: int = 2,
                  eta: float = 0.1, eta_prime: float = 0.1, force: bool = False,
                  max_iter: int = 2000) -> ExhaustionRun:
    """Solve on Ω_0, ..., Ω_{m_max} with aligned grids and check nesting.

    Parameters
    ----------
    f : Nonlinearity, or a pair (f_u, f_v) for ``scheme="system"``
        Ignored for ``scheme="linear"``.
    scheme : {"linear", "contraction", "monotone", "system"}
    seed : {"zero", "glued"}
        Monotone and system runs start from ``solve(h)`` or from the glued
        compactly supported subsolution.
    lam, h : constant or callable of the node coordinates

    Raises
    ------
    HypothesisError
        From the scheme when its hypothesis fails with ``c = d^2/8``.
    MonotonicityError
        If ``u_{m+1} < u_m - 10 tol`` at some node of Ω_m.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if seed not in ("zero", "glued"):
        raise ValueError(f"unknown seed {seed!r}")
    c = d * d / 8.0
    run = ExhaustionRun(d, n, scheme, seed, c=c, tol=tol)

    for spec in exhaustion_family(d, n, m_max):
        grid = discretize(spec, resolution)
        op = assemble_laplacian(grid)
        if scheme == "linear":
            u, diag = poisson_solve(op, h, c=c)
            run.iterations.append(0)
            run.residuals.append(diag.residual)
            run.theorem_bound = c * _norm(as_values(h, grid))
        elif scheme == "contraction":
            problem = Problem(grid, f, lam, h, op=op)
            if theta is None:
                theta = best_theta(f, problem.lam_norm, problem.h_norm, c)
            u, rep = iterate_contraction(problem, theta, tol=tol, force=force, c=c, max_iter=max_iter)
            run.theta = theta
            run.theorem_bound = rep.predicted_bound
            run.iterations.append(rep.iterations)
            run.residuals.append(rep.residual)
        elif scheme == "monotone":
            problem = Problem(grid, f, lam, h, op=op)
            seed_field = _seed(seed, f, n, eta, eta_prime, grid)
            u, rep = iterate_monotone(problem, seed_field, tol=tol, c=c, max_iter=max_iter)
            if f.growth is not None:
                hyp = sublinear_feasible(c, problem.lam_norm, f.growth[0], f.growth[1], problem.h_norm)
                run.theorem_bound = hyp.bound
            run.iterations.append(rep.iterations)
            run.residuals.append(rep.residual)
        else:
            f_u, f_v = f
            pu = Problem(grid, f_u, lam, h, op=op)
            pv = Problem(grid, f_v, lam, h, op=op)
            z = _seed(seed, (f_u, f_v), n, eta, eta_prime, grid)
            u, v, (ru, rv) = iterate_system(pu, pv, z, z, tol=tol, c=c, force=force, max_iter=max_iter)
            run.partners.append(v)
            run.iterations.append(ru.iterations)
            run.residuals.append(max(ru.residual, rv.residual))
        run.grids.append(grid)
        run.solutions.append(u)
        run.sup_norms.append(u.sup_norm())
        if len(run.grids) > 1:
            _compare_nested(run, tol)
    return run


def _seed(kind, f, n, eta, eta_prime, grid):
    if kind == "zero":
        return None
    fs = f if isinstance(f, tuple) else (f,)
    exponents = [g.growth[1] for g in fs if g.growth is not None]
    if not exponents:
        raise ValueError("glued seeds need power-type growth data")
    profile = glued_z(n, max(exponents), eta, eta_prime, grid=grid)
    return profile.on_grid(grid)


def _compare_nested(run: ExhaustionRun, tol: float):
    small, big = run.grids[-2], run.grids[-1]
    idx = shared_node_index(small, big)
    pairs = [(run.solutions[-2], run.solutions[-1])]
    if run.partners:
        pairs.append((run.partners[-2], run.partners[-1]))
    worst = math.inf
    for a, b in pairs:
        worst = min(worst, float(np.min(b.values[idx] - a.values)))
    run.nesting_min.append(worst)
    if worst < -10 * tol:
        raise MonotonicityError(f"u_(m+1) < u_m on Omega_{small.domain.m} by {-worst:.3e}", run)
    win_small = shared_node_index(run.grids[0], small)
    win_big = shared_node_index(run.grids[0], big)
    run.window_differences.append(_norm(b.values[win_big] - a.values[win_small]))


def window_convergence_report(run: ExhaustionRun) -> dict:
    """Window differences ``||u_{m+1} - u_m||`` on Ω_0 and a geometric fit.

    ``fitted_ratio`` is None with fewer than two positive differences.
    """
    diffs = np.asarray(run.window_differences, dtype=float)
    ratios = [float(diffs[k] / diffs[k - 1]) for k in range(1, diffs.size) if diffs[k - 1] > 0]
    positive = diffs > 0
    fitted = None
    if np.count_nonzero(positive) >= 2:
        k = np.arange(diffs.size)[positive]
        fitted = float(math.exp(np.polyfit(k, np.log(diffs[positive]), 1)[0]))
    decays = None if fitted is None else bool(fitted < 1)
    extrapolated = None
    if fitted is not None and fitted < 1 and len(run.solutions) >= 2:
        last = run.window_values(-1)
        prev = run.window_values(-2)
        extrapolated = last + (last - prev) * fitted / (1 - fitted)
    return {
        "m": run.m_values[1:],
        "window_differences": diffs.tolist(),
        "ratios": ratios,
        "fitted_ratio": fitted,
        "decays": decays,
        "flag_non_decay": decays is False,
        "extrapolated_window": extrapolated,
    }
