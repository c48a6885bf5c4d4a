"""Acceptance suite: one group of tests per numbered criterion."""

import math
import time
import timeit

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slabsolve import bounds
from slabsolve.config import EXPERIMENTS, dump_config, parse_config
from slabsolve.domain import Interval, RadialBall, discretize
from slabsolve.exhaustion import solve_on_slab, window_convergence_report
from slabsolve.experiments import run
from slabsolve.iterate import Problem, iterate_contraction, iterate_monotone, iterate_system
from slabsolve.nonlinearity import catalog
from slabsolve.output import record_json
from slabsolve.poisson import assemble_laplacian, poisson_solve
from slabsolve.subsolution import glued_z, radial_w, verify_subsolution

MONOTONE_TOL = 1e-7


def _ball(n, res=400):
    return discretize(RadialBall(1.0, n), res)


# 1 ------------------------------------------------------------------ Bratu threshold

@pytest.mark.criterion(1)
def test_bratu_threshold_value():
    assert abs(bounds.bratu_lambda_star(2, 0.5) - 1.13429) <= 1e-4


@pytest.mark.criterion(1)
def test_bratu_threshold_runtime():
    per_call = min(timeit.repeat(lambda: bounds.bratu_lambda_star(2, 0.5), number=200, repeat=5)) / 200
    assert per_call < 1e-3


# 2 -------------------------------------------------------------- conformal threshold

@pytest.mark.criterion(2)
def test_conformal_threshold_and_argmax():
    assert abs(bounds.conformal_threshold() - 0.1452) <= 1e-3
    theta, _ = bounds.optimize_theta(bounds.conformal_objective)
    assert abs(theta - 0.4130) <= 5e-3


# 3 --------------------------------------------------------------- coefficient audit

@pytest.mark.criterion(3)
def test_coefficient_audit_consistency():
    t = 0.412962
    coeff = 2 * t * bounds.lambert_w((1 - t) / t)
    assert coeff == pytest.approx(bounds.bratu_lambda_star(1, t), rel=1e-15)


@pytest.mark.criterion(3)
def test_coefficient_audit_flagged_in_output():
    rec, code = run(parse_config("", "bratu-threshold"))
    assert code == 0
    audit = [c for c in rec.checks if c["name"] == "lambda_star_coefficient"][0]
    assert audit["expected"] == 1.162022 and audit["gating"] is False
    assert audit["value"] == pytest.approx(bounds.bratu_lambda_star(1, 0.412962), rel=1e-15)
    assert any("discrepancy" in note for note in rec.notes)


# 4 ------------------------------------------------------------- exact maximum principle

@pytest.mark.criterion(4)
@pytest.mark.parametrize("d", [1.0, 2.0, 2 * math.sqrt(2)])
def test_interval_sup_norm(d):
    g = discretize(Interval(d), 64)
    u, _ = poisson_solve(assemble_laplacian(g), 1.0)
    assert abs(u.sup_norm() - d * d / 8) <= 2 * g.h**2


@pytest.mark.criterion(4)
@pytest.mark.parametrize("n", [2, 3, 5])
def test_ball_sup_norm(n):
    g = _ball(n, 64)
    u, _ = poisson_solve(assemble_laplacian(g), 1.0)
    assert abs(u.sup_norm() - 1 / (2 * n)) <= 2 * g.h**2


# 5 ------------------------------------------------------------------- radial oracle

@pytest.mark.criterion(5)
@pytest.mark.parametrize("n", [2, 3, 5])
def test_radial_oracle_order(n):
    w = radial_w(n, 1.0)
    hs, errs = [], []
    for res in (25, 50, 100, 200, 400):
        g = _ball(n, res)
        u, _ = poisson_solve(assemble_laplacian(g), w.source)
        hs.append(g.h)
        errs.append(np.max(np.abs(u.values - w(g.radius()))))
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert order >= 1.9
    assert max(e / h**2 for e, h in zip(errs, hs)) <= 1.0


# 6 ----------------------------------------------------------------- contraction run

@pytest.mark.criterion(6)
def test_bratu_contraction_run():
    grid = _ball(2, 2000)
    start = time.perf_counter()
    u, rep = iterate_contraction(Problem(grid, catalog("exp"), 1.0, 0.0), 0.5)
    elapsed = time.perf_counter() - start
    assert rep.converged
    assert rep.fitted_rate <= 0.55
    assert u.sup_norm() <= 0.5
    assert rep.residual <= 1e-6
    assert elapsed < 10.0
    assert u.sup_norm() == pytest.approx(0.316694, abs=1e-6)


# 7 ---------------------------------------------------------------- sublinear run

@pytest.mark.criterion(7)
@pytest.mark.parametrize("n", [2, 3, 5])
def test_sublinear_monotone_run(n):
    grid = _ball(n)
    w = radial_w(n, bounds.sublinear_seed_epsilon(n, 0.5)).on_grid(grid)
    u, rep = iterate_monotone(Problem(grid, catalog("power", p=0.5)), w)
    assert rep.min_increment >= -MONOTONE_TOL
    assert np.all(u.values >= w.values)
    assert u.sup_norm() <= bounds.sublinear_norm_bound(n, 0.5)


@pytest.mark.criterion(7)
def test_sublinear_scaling_band():
    rec, code = run(parse_config("[sublinear-scaling]\ndims = " + ", ".join(map(str, range(2, 17))) + "\n",
                                 "sublinear-scaling"))
    products = [pt["product"] for pt in rec.summaries["points"]]
    assert [pt["n"] for pt in rec.summaries["points"]] == list(range(2, 17))
    assert max(products) / min(products) <= 4.0
    assert code == 0


# 8 -------------------------------------------------------------------- staircase

@pytest.mark.criterion(8)
@pytest.mark.parametrize("p", [0.1, 0.3, math.log10(2)])
def test_staircase_run(p):
    grid = _ball(2)
    u, rep = iterate_monotone(Problem(grid, catalog("staircase", p=p), 1.0, 1.0))
    assert rep.converged
    assert rep.min_increment >= -MONOTONE_TOL
    assert u.sup_norm() <= 1.0


@pytest.mark.criterion(8)
def test_staircase_exponent_comparison():
    assert bounds.staircase_max_exponent(18) >= (18 + 2) / (18 - 2)


# 9 ------------------------------------------------------------------ Lane-Emden ball

@pytest.mark.criterion(9)
def test_lane_emden_ball():
    grid = _ball(2)
    tol = 1e-10
    w = radial_w(2, bounds.sublinear_seed_epsilon(2, 0.5)).on_grid(grid)
    f = catalog("power", p=0.5)
    u, v, (ru, rv) = iterate_system(Problem(grid, f), Problem(grid, f), w, w, tol=tol)
    assert u.sup_norm() > 0
    assert np.max(np.abs(u.values - v.values)) <= 10 * tol
    assert max(ru.residual, rv.residual) <= 1e-6
    assert np.all(u.values >= w.values) and np.all(v.values >= w.values)


# 10 ---------------------------------------------------------------- slab exhaustion

@pytest.fixture(scope="module")
def conformal_run():
    start = time.perf_counter()
    result = solve_on_slab(catalog("exp2"), 2 * math.sqrt(2), 6, 16, "contraction", lam=0.14, h=0.0, tol=1e-8)
    return result, time.perf_counter() - start


@pytest.mark.criterion(10)
def test_conformal_nesting(conformal_run):
    result, _ = conformal_run
    assert result.m_values == list(range(7))
    assert min(result.nesting_min) >= -MONOTONE_TOL


@pytest.mark.criterion(10)
def test_conformal_window_decay(conformal_run):
    report = window_convergence_report(conformal_run[0])
    assert report["fitted_ratio"] is not None and report["fitted_ratio"] < 1


@pytest.mark.criterion(10)
def test_conformal_longitudinal_variation(conformal_run):
    assert conformal_run[0].longitudinal_variation() <= 1e-3


@pytest.mark.criterion(10)
def test_conformal_runtime(conformal_run):
    assert conformal_run[1] < 120.0


# 11 ------------------------------------------------------------ subsolution certificate

@pytest.mark.criterion(11)
def test_glued_profile_certified():
    d = 2 * math.sqrt(2)
    grid = solve_on_slab(None, d, 0, 10, "linear").grids[0]
    check = verify_subsolution(glued_z(2, 0.5, 0.1, 0.1), 0.5, grid)
    assert check.worst_violation <= 1e-8


@pytest.mark.criterion(11)
def test_lane_emden_slab_from_glued_seed():
    f = catalog("power", p=0.5)
    result = solve_on_slab((f, f), 2 * math.sqrt(2), 6, 10, "system", "glued", tol=1e-9)
    assert min(result.sup_norms) > 0
    assert result.monotone_in_m
    assert min(result.nesting_min) >= -MONOTONE_TOL


# 12 ------------------------------------------------------------------ property suites

GRID12 = discretize(RadialBall(1.0, 3), 40)
OP12 = assemble_laplacian(GRID12)


@pytest.mark.criterion(12)
@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=GRID12.n_unknowns, max_size=GRID12.n_unknowns),
       st.lists(st.floats(0, 10), min_size=GRID12.n_unknowns, max_size=GRID12.n_unknowns),
       st.floats(-3, 3), st.floats(-3, 3))
def test_poisson_properties(g1, g2, a, b):
    g1, g2 = np.array(g1), np.array(g2)
    u1, _ = poisson_solve(OP12, g1)
    u2, _ = poisson_solve(OP12, g1 + g2)
    ul, _ = poisson_solve(OP12, a * g1 + b * g2)
    u3, _ = poisson_solve(OP12, g2)
    assert np.min(u1.values) >= -1e-9
    assert np.min(u2.values - u1.values) >= -1e-9
    assert np.max(np.abs(ul.values - a * u1.values - b * u3.values)) <= 1e-9


@pytest.mark.criterion(12)
@given(st.floats(-1 / math.e + 1e-9, 1e6))
def test_lambert_back_substitution(x):
    w = bounds.lambert_w(x)
    assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))


@pytest.mark.criterion(12)
@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_config_determinism(experiment):
    cfg = parse_config("", experiment)
    again = parse_config(dump_config(cfg), experiment)
    assert again == cfg and again.digest() == cfg.digest()


@pytest.mark.criterion(12)
def test_full_verify_runtime():
    cfg = parse_config("", "verify")
    start = time.perf_counter()
    rec, code = run(cfg)
    elapsed = time.perf_counter() - start
    assert code == 0, [c["name"] for c in rec.checks if c["gating"] and not c["passed"]]
    assert elapsed < 300.0
    assert record_json(rec) == record_json(run(cfg)[0])
