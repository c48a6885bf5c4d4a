import math

import numpy as np
import pytest

from slabsolve.bounds import bratu_lambda_star, sublinear_seed_epsilon
from slabsolve.domain import Box, RadialBall, discretize
from slabsolve.errors import ConvergenceError, HypothesisError, SubsolutionError
from slabsolve.iterate import Problem, iterate_contraction, iterate_monotone, iterate_system, residual
from slabsolve.nonlinearity import catalog
from slabsolve.poisson import poisson_solve
from slabsolve.subsolution import radial_w

BALL2 = discretize(RadialBall(1.0, 2), 400)


def bratu(lam, grid=BALL2, h=0.0):
    return Problem(grid, catalog("exp"), lam, h)


def test_bratu_contraction():
    u, rep = iterate_contraction(bratu(1.0), 0.5)
    assert rep.converged
    assert u.sup_norm() <= 0.5
    assert rep.fitted_rate <= 0.55
    assert all(rep.checks.values())
    assert rep.residual <= 1e-6


def test_bratu_near_threshold_rate():
    lam = 1.12
    assert lam < bratu_lambda_star(2, 0.5)
    grid = discretize(RadialBall(1.0, 2), 2000)
    u, rep = iterate_contraction(bratu(lam, grid), 0.5)
    assert rep.converged and rep.fitted_rate <= 0.55
    # contraction slope in log-differences
    assert math.log(rep.fitted_rate) <= math.log(0.5) + 0.05


def test_refusal_and_force():
    with pytest.raises(HypothesisError):
        iterate_contraction(bratu(1.2), 0.5)
    u, rep = iterate_contraction(bratu(1.2), 0.5, force=True)
    assert rep.converged and rep.extra["forced"] is True


def test_lambda_zero_is_poisson():
    grid = discretize(Box((2.0, 1.0)), 16)
    u, rep = iterate_contraction(Problem(grid, catalog("exp"), 0.0, 1.0), 0.5)
    ref, _ = poisson_solve(Problem(grid, catalog("exp"), 0.0, 1.0).op, 1.0)
    assert np.max(np.abs(u.values - ref.values)) <= 1e-12
    assert rep.iterations <= 2


def test_max_iter_error_carries_report():
    with pytest.raises(ConvergenceError) as info:
        iterate_contraction(bratu(1.0), 0.5, max_iter=3)
    assert info.value.report is not None


def test_sublinear_monotone_from_w():
    eps = sublinear_seed_epsilon(2, 0.5)
    w = radial_w(2, eps).on_grid(BALL2)
    u, rep = iterate_monotone(Problem(BALL2, catalog("power", p=0.5)), w)
    assert rep.min_increment >= -1e-7
    assert np.min(u.values - w.values) >= 0
    assert rep.residual <= 1e-6
    assert u.sup_norm() > 0.04


def test_zero_seed_trivial_fixed_point():
    u, rep = iterate_monotone(Problem(BALL2, catalog("power", p=0.5)), None)
    assert u.sup_norm() == 0.0


def test_staircase_monotone():
    p = 0.3
    u, rep = iterate_monotone(Problem(BALL2, catalog("staircase", p=p), 1.0, 1.0))
    assert rep.converged and rep.min_increment >= -1e-7
    assert u.sup_norm() <= 1.0
    assert rep.bound_respected


def test_monotone_rejects_negative_data():
    with pytest.raises(HypothesisError):
        iterate_monotone(Problem(BALL2, catalog("power", p=0.5), 1.0, -1.0))
    with pytest.raises(HypothesisError):
        iterate_monotone(Problem(BALL2, catalog("power", p=0.5), -1.0, 0.0))


def test_monotone_rejects_bad_seed():
    w = radial_w(2, 10 * sublinear_seed_epsilon(2, 0.5)).on_grid(BALL2)
    with pytest.raises(SubsolutionError):
        iterate_monotone(Problem(BALL2, catalog("power", p=0.5)), w)


def test_scheme_agreement_small_lambda():
    grid = discretize(RadialBall(1.0, 3), 200)
    p = bratu(0.5, grid, h=0.2)
    uc, _ = iterate_contraction(p, 0.5, tol=1e-10)
    um, _ = iterate_monotone(p, tol=1e-10)
    assert np.max(np.abs(uc.values - um.values)) <= 10 * (1e-10 + grid.h**2)


def test_grid_refinement():
    sols = []
    for res in (100, 200, 400):
        grid = discretize(RadialBall(1.0, 2), res)
        u, _ = iterate_contraction(bratu(1.0, grid), 0.5, tol=1e-12)
        sols.append(u.values[::(res // 100)][:100])
    d1 = np.max(np.abs(sols[1] - sols[0]))
    d2 = np.max(np.abs(sols[2] - sols[1]))
    assert d1 / d2 >= 3.5


def test_system_symmetric_pair():
    eps = sublinear_seed_epsilon(2, 0.5)
    w = radial_w(2, eps).on_grid(BALL2)
    f = catalog("power", p=0.5)
    u, v, (ru, rv) = iterate_system(Problem(BALL2, f), Problem(BALL2, f), w, w)
    assert np.max(np.abs(u.values - v.values)) <= 1e-7
    assert max(ru.residual, rv.residual) <= 1e-6
    assert np.min(u.values - w.values) >= 0
    assert ru.checks["coupled_estimate"] and rv.checks["coupled_estimate"]


def test_system_zero_seeds():
    f = catalog("power", p=0.5)
    u, v, _ = iterate_system(Problem(BALL2, f), Problem(BALL2, f), None, None)
    assert u.sup_norm() == 0.0 and v.sup_norm() == 0.0


def test_system_requires_small_exponents():
    f = catalog("power", p=0.75)
    with pytest.raises(HypothesisError):
        iterate_system(Problem(BALL2, f), Problem(BALL2, f))


def test_residual_examples():
    grid = discretize(RadialBall(1.0, 3), 100)
    u, _ = poisson_solve(Problem(grid, catalog("exp"), 0.0, 1.0).op, 1.0)
    assert residual(Problem(grid, catalog("exp"), 0.0, 1.0), u) <= 1e-9
    w = radial_w(3, 1.0)
    errs = []
    for res in (50, 100):
        g = discretize(RadialBall(1.0, 3), res)
        prob = Problem(g, catalog("exp"), 0.0, w.source)
        errs.append(residual(prob, w.on_grid(g)))
    assert errs[1] < errs[0] / 3
    rng = np.random.default_rng(0)
    noise = rng.normal(size=grid.n_unknowns)
    prob = Problem(grid, catalog("exp"), 0.0, 1.0)
    big = [residual(prob, u.values + s * noise) for s in (1e-3, 1e-2, 1e-1)]
    assert big[0] > 1.0 and big[0] < big[1] < big[2]
