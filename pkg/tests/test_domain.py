import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slabsolve.domain import (
    Box,
    Field,
    Interval,
    RadialBall,
    SlabTruncation,
    discretize,
    domain_from_dict,
    exhaustion_family,
    shared_node_index,
    slab_diameter,
)


@pytest.mark.parametrize("spec, expected", [
    (Box((3.0, 1.0)), 1.0),
    (RadialBall(1.0, 2), 2.0),
    (SlabTruncation(2 * math.sqrt(2), 5, 2), 2 * math.sqrt(2)),
    (Interval(1.5), 1.5),
])
def test_slab_diameter(spec, expected):
    assert slab_diameter(spec) == pytest.approx(expected, rel=1e-15)


@given(st.lists(st.floats(0.1, 10), min_size=1, max_size=4), st.integers(0, 3), st.floats(0, 5))
def test_slab_diameter_monotone_in_box_widths(widths, axis, growth):
    axis = axis % len(widths)
    wider = list(widths)
    wider[axis] += growth
    assert slab_diameter(Box(tuple(wider))) >= slab_diameter(Box(tuple(widths)))


@pytest.mark.parametrize("bad", [
    lambda: Interval(0.0),
    lambda: Box((1.0, -2.0)),
    lambda: RadialBall(1.0, 0),
    lambda: SlabTruncation(1.0, -1),
])
def test_invalid_specs(bad):
    with pytest.raises(ValueError):
        bad()


def test_interval_grid():
    g = discretize(Interval(1.0), 10)
    assert g.n_interior == 9
    assert g.spacing[0] == pytest.approx(0.1)


def test_radial_grid_has_99_interior_nodes():
    g = discretize(RadialBall(1.0, 3), 100)
    assert g.n_interior == 99
    # the origin carries the symmetry condition and is an unknown too
    assert g.n_unknowns == 100
    assert g.radius()[0] == 0.0


def test_box_grid():
    g = discretize(Box((2.0, 1.0)), 10)
    assert g.shape == (19, 9)
    assert len(g.boundary_index()) == 21 * 11 - 19 * 9


def test_coarse_grid_names_axis():
    with pytest.raises(ValueError, match="axis 1"):
        discretize(Box((2.0, 0.2)), 10)


@settings(max_examples=30)
@given(st.floats(0.5, 4), st.floats(0.5, 3), st.floats(8, 30))
def test_extents_reproduced(a, b, res):
    g = discretize(Box((a, b)), res)
    for axis, width, h in zip(g.axes, (a, b), g.spacing):
        assert abs((axis[-1] - axis[0]) - width) <= h
        assert np.allclose(np.diff(axis), h)


def test_field_length_and_norm():
    g = discretize(Box((1.0, 1.0)), 8)
    f = g.constant(-2.5)
    assert len(f) == g.n_unknowns
    assert f.sup_norm() == 2.5
    with pytest.raises(ValueError):
        Field(g, np.zeros(g.n_unknowns + 1))


def test_exhaustion_family_half_widths():
    fam = exhaustion_family(1.0, 2, 2)
    assert [s.longitudinal_half_width for s in fam] == [2, 3, 4]
    assert len(exhaustion_family(1.0, 2, 0)) == 1
    assert all(fam[m + 1].contains(fam[m]) for m in range(2))


def test_exhaustion_grids_align():
    d = 2 * math.sqrt(2)
    grids = [discretize(s, 7.3) for s in exhaustion_family(d, 2, 3)]
    for small, big in zip(grids, grids[1:]):
        assert np.array_equal(small.axes[1], big.axes[1])
        idx = shared_node_index(small, big)
        assert np.allclose(big.points()[idx], small.points(), atol=1e-12)


def test_misaligned_grids_rejected():
    a = discretize(Box((2.0, 1.0)), 10)
    b = discretize(Box((2.0, 1.0)), 7)
    with pytest.raises(ValueError):
        shared_node_index(a, b)


def test_domain_dict_round_trip():
    for spec in (Interval(2.0), Box((1.0, 3.0)), RadialBall(1.5, 4), SlabTruncation(4.0, 3, 2)):
        assert domain_from_dict(spec.to_dict()) == spec
