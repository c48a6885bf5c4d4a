import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slabsolve.nonlinearity import Nonlinearity, catalog, staircase_level


def test_catalog_examples():
    assert float(catalog("power", p=0.5).value(4.0)) == 2.0
    assert float(catalog("staircase", p=1).value(0.25)) == 2.0
    assert float(catalog("staircase", p=2).value(0.25)) == 4.0
    assert float(catalog("exp").derivative(0.0)) == 1.0
    assert float(catalog("exp2").derivative(0.0)) == 2.0


def test_catalog_metadata():
    assert catalog("power", p=0.5).holder == (0.5, 1.0)
    assert catalog("staircase", p=0.3).growth == pytest.approx((10**0.3, 0.3))
    assert catalog("staircase", p=1).continuity == "lsc"
    assert catalog("power", p=2).derivative is not None


def test_unknown_name():
    with pytest.raises(ValueError, match="unknown nonlinearity"):
        catalog("sin")


def test_differentiable_needs_derivative():
    with pytest.raises(ValueError):
        Nonlinearity(np.sin)


@pytest.mark.parametrize("l", range(1, 40))
def test_staircase_breakpoints_left_open_right_closed(l):
    x = l / 10
    assert staircase_level(x) == l - 1
    assert staircase_level(np.nextafter(x, np.inf)) == l
    assert staircase_level(np.nextafter(x, -np.inf)) == l - 1


def test_staircase_zero_below_first_step():
    assert np.all(staircase_level(np.array([0.0, 0.05, 0.1])) == 0)


@given(st.floats(0, 50), st.floats(0, 50))
def test_staircase_nondecreasing(a, b):
    lo, hi = min(a, b), max(a, b)
    assert staircase_level(lo) <= staircase_level(hi)


@given(st.integers(1, 200), st.floats(1e-9, 0.099))
def test_staircase_lower_semicontinuous(l, delta):
    # nondecreasing + left-continuous at each jump: the value at a jump is the lower one
    f = catalog("staircase", p=0.7)
    b = l / 10
    assert f(b) == f(b - delta) <= f(b + delta)


@given(st.floats(0, 50))
def test_staircase_growth_bound(x):
    for p in (0.3, 1.0, 2.0):
        assert catalog("staircase", p=p)(x) <= 10**p * x**p * (1 + 1e-12)


@pytest.mark.parametrize("name, params", [("power", {"p": 0.5}), ("power", {"p": 0.25}), ("staircase", {"p": 0.3})])
def test_spot_check_metadata(name, params):
    checks = catalog(name, **params).spot_check(0.0, 5.0)
    assert all(v <= 1 + 1e-12 for v in checks.values())
