"""
Domains and their finite-difference grids.

Four domain variants are supported:

* ``Interval(width)`` -- the open interval (-d/2, d/2).
* ``Box(widths)`` -- an axis-aligned box centred at the origin.
* ``RadialBall(radius, dim)`` -- a ball in R^n, discretized through the
  radial reduction on [0, R].
* ``SlabTruncation(width, m, dim)`` -- the slab |x_n| < d/2 intersected with
  the cube [-m-2, m+2]^n.  These are the nested truncations used to solve
  problems on an unbounded slab.

Grids store the full set of node coordinates per axis (boundary endpoints
included); unknowns live on the interior nodes, flattened in C order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainSpec",
    "Interval",
    "Box",
    "RadialBall",
    "SlabTruncation",
    "Grid",
    "Field",
    "slab_diameter",
    "discretize",
    "exhaustion_family",
    "shared_node_index",
    "MIN_INTERVALS",
]

# Minimum number of grid intervals across the narrowest extent.
MIN_INTERVALS = 4


class DomainSpec:
    """Common base of the domain variants."""

    kind: str = "abstract"

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def half_widths(self) -> tuple[float, ...]:
        """Half extent of the domain along each Cartesian axis."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive finite length, got {value!r}")


@dataclass(frozen=True)
class Interval(DomainSpec):
    width: float
    kind = "interval"

    def __post_init__(self):
        _positive("width", self.width)

    @property
    def dim(self) -> int:
        return 1

    def half_widths(self):
        return (self.width / 2,)

    def to_dict(self):
        return {"kind": self.kind, "width": self.width}


@dataclass(frozen=True)
class Box(DomainSpec):
    widths: tuple[float, ...]
    kind = "box"

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(float(w) for w in self.widths))
        if len(self.widths) < 1:
            raise ValueError("a box needs at least one axis")
        for i, w in enumerate(self.widths):
            _positive(f"widths[{i}]", w)

    @property
    def dim(self) -> int:
        return len(self.widths)

    def half_widths(self):
        return tuple(w / 2 for w in self.widths)

    def to_dict(self):
        return {"kind": self.kind, "widths": list(self.widths)}


@dataclass(frozen=True)
class RadialBall(DomainSpec):
    radius: float
    ambient_dim: int
    kind = "ball"

    def __post_init__(self):
        _positive("radius", self.radius)
        if int(self.ambient_dim) != self.ambient_dim or self.ambient_dim < 1:
            raise ValueError(f"ambient dimension must be an integer >= 1, got {self.ambient_dim!r}")

    @property
    def dim(self) -> int:
        return self.ambient_dim

    def half_widths(self):
        return (self.radius,) * self.ambient_dim

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius, "dim": self.ambient_dim}


@dataclass(frozen=True)
class SlabTruncation(DomainSpec):
    """The slab ``|x_n| < width/2`` cut down to ``[-m-2, m+2]^n``.

    The first ``n - 1`` axes are longitudinal, the last one is transverse.
    """

    width: float
    m: int
    ambient_dim: int = 2
    kind = "slab"

    def __post_init__(self):
        _positive("width", self.width)
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"truncation index m must be an integer >= 0, got {self.m!r}")
        if int(self.ambient_dim) != self.ambient_dim or self.ambient_dim < 2:
            raise ValueError("slab truncations need ambient dimension >= 2")

    @property
    def dim(self) -> int:
        return self.ambient_dim

    @property
    def longitudinal_half_width(self) -> float:
        return float(self.m + 2)

    @property
    def transverse_half_width(self) -> float:
        return min(self.width / 2, self.longitudinal_half_width)

    def half_widths(self):
        return (self.longitudinal_half_width,) * (self.ambient_dim - 1) + (self.transverse_half_width,)

    def contains(self, other: "SlabTruncation") -> bool:
        """True if ``other`` is a subset of this truncation."""
        return all(a >= b for a, b in zip(self.half_widths(), other.half_widths())) and self.dim == other.dim

    def to_dict(self):
        return {"kind": self.kind, "width": self.width, "m": self.m, "dim": self.ambient_dim}


def domain_from_dict(data: dict) -> DomainSpec:
    kind = data.get("kind")
    if kind == "interval":
        return Interval(float(data["width"]))
    if kind == "box":
        return Box(tuple(float(w) for w in data["widths"]))
    if kind == "ball":
        return RadialBall(float(data.get("radius", 1.0)), int(data["dim"]))
    if kind == "slab":
        return SlabTruncation(float(data["width"]), int(data["m"]), int(data.get("dim", 2)))
    raise ValueError(f"unknown domain kind {kind!r}")


def slab_diameter(spec: DomainSpec) -> float:
    """Width of the thinnest axis-aligned slab containing the domain.

    Examples
    --------
    >>> slab_diameter(Box((3.0, 1.0)))
    1.0
    >>> slab_diameter(RadialBall(1.0, 2))
    2.0
    """
    if isinstance(spec, RadialBall):
        return 2.0 * spec.radius
    return 2.0 * min(spec.half_widths())


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform finite-difference grid on a domain.

    Attributes
    ----------
    domain : DomainSpec
        The domain this grid discretizes.
    axes : tuple of ndarray
        Node coordinates per axis, boundary endpoints included.  For radial
        grids there is a single axis holding r in [0, R].
    spacing : tuple of float
        Uniform spacing per axis.
    radial : bool
        True for the radial reduction of a ball.  The node r = 0 is then an
        unknown carrying the symmetry condition u'(0) = 0, and r = R is the
        only boundary node.
    """

    domain: DomainSpec
    axes: tuple
    spacing: tuple
    radial: bool = False

    @property
    def shape(self) -> tuple[int, ...]:
        """Shape of the unknown array."""
        if self.radial:
            return (len(self.axes[0]) - 1,)
        return tuple(len(a) - 2 for a in self.axes)

    @property
    def n_unknowns(self) -> int:
        return int(np.prod(self.shape))

    @property
    def n_interior(self) -> int:
        """Number of nodes strictly inside the domain.

        For radial grids this excludes the symmetry node at the origin, which
        is still an unknown.
        """
        if self.radial:
            return len(self.axes[0]) - 2
        return self.n_unknowns

    @property
    def ambient_dim(self) -> int:
        return self.domain.dim

    @property
    def h(self) -> float:
        """Largest spacing, the scale of the discretization error."""
        return max(self.spacing)

    def interior_axes(self) -> tuple[np.ndarray, ...]:
        if self.radial:
            return (self.axes[0][:-1],)
        return tuple(a[1:-1] for a in self.axes)

    def points(self) -> np.ndarray:
        """Coordinates of the unknown nodes, shape ``(n_unknowns, k)``."""
        mesh = np.meshgrid(*self.interior_axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def radius(self) -> np.ndarray:
        """Euclidean distance from the origin of each unknown node."""
        if self.radial:
            return self.axes[0][:-1].copy()
        return np.sqrt(np.sum(self.points() ** 2, axis=1))

    def interior_index(self) -> np.ndarray:
        return np.arange(self.n_unknowns)

    def boundary_index(self) -> np.ndarray:
        """Flat indices of boundary nodes in the full node array."""
        full_shape = tuple(len(a) for a in self.axes)
        if self.radial:
            return np.array([full_shape[0] - 1])
        mask = np.ones(full_shape, dtype=bool)
        mask[tuple(slice(1, -1) for _ in full_shape)] = False
        return np.flatnonzero(mask)

    def full(self, values) -> np.ndarray:
        """Embed unknown values into the full node array (zero on the boundary)."""
        values = np.asarray(values, dtype=float)
        out = np.zeros(tuple(len(a) for a in self.axes))
        if self.radial:
            out[:-1] = values
        else:
            out[tuple(slice(1, -1) for _ in self.axes)] = values.reshape(self.shape)
        return out

    def evaluate(self, func: Callable) -> "Field":
        """Sample ``func`` on the unknown nodes.

        Radial grids call ``func(r)``; tensor grids call ``func(points)`` with
        an ``(N, k)`` coordinate array.
        """
        if self.radial:
            values = func(self.radius())
        else:
            values = func(self.points())
        return Field(self, np.broadcast_to(np.asarray(values, dtype=float), (self.n_unknowns,)).copy())

    def constant(self, value: float) -> "Field":
        return Field(self, np.full(self.n_unknowns, float(value)))

    def zeros(self) -> "Field":
        return self.constant(0.0)


@dataclass(frozen=True, eq=False)
class Field:
    """Grid function: one real value per unknown node."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.shape != (self.grid.n_unknowns,):
            raise ValueError(f"field has {values.size} values, grid has {self.grid.n_unknowns} unknowns")
        object.__setattr__(self, "values", values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.values.size


def as_values(x, grid: Grid) -> np.ndarray:
    """Values of a Field, array, scalar or callable on ``grid``'s unknowns."""
    if isinstance(x, Field):
        if x.grid is not grid and x.grid.n_unknowns != grid.n_unknowns:
            raise ValueError("field lives on a different grid")
        return x.values
    if callable(x):
        return grid.evaluate(x).values
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return np.full(grid.n_unknowns, float(arr))
    if arr.size != grid.n_unknowns:
        raise ValueError(f"array of size {arr.size} does not match {grid.n_unknowns} unknowns")
    return arr.ravel()


def _axis_nodes(half_width: float, n_intervals: int) -> np.ndarray:
    return np.linspace(-half_width, half_width, n_intervals + 1)


def discretize(spec: DomainSpec, resolution: float) -> Grid:
    """Uniform grid with roughly ``resolution`` nodes per unit length.

    Each axis of extent ``e`` gets ``round(e * resolution)`` intervals.  The
    longitudinal axes of a slab truncation use spacing exactly
    ``1 / round(resolution)`` so that grids of different truncations share
    nodes.

    Examples
    --------
    >>> g = discretize(Interval(1.0), 10)
    >>> g.n_interior, round(g.spacing[0], 12)
    (9, 0.1)
    """
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution!r}")

    if isinstance(spec, RadialBall):
        n = int(round(spec.radius * resolution))
        _check_coarse(n, "radius")
        r = np.linspace(0.0, spec.radius, n + 1)
        return Grid(spec, (r,), (spec.radius / n,), radial=True)

    if isinstance(spec, SlabTruncation):
        k = int(round(resolution))
        if k < 1:
            raise ValueError("slab grids need resolution >= 1")
        axes, spacing = [], []
        for i in range(spec.dim - 1):
            n = 2 * (spec.m + 2) * k
            _check_coarse(n, f"longitudinal axis {i}")
            axes.append(np.arange(-(spec.m + 2) * k, (spec.m + 2) * k + 1) / k)
            spacing.append(1.0 / k)
        half = spec.transverse_half_width
        n = int(round(2 * half * resolution))
        _check_coarse(n, f"transverse axis {spec.dim - 1}")
        axes.append(_axis_nodes(half, n))
        spacing.append(2 * half / n)
        return Grid(spec, tuple(axes), tuple(spacing))

    axes, spacing = [], []
    for i, half in enumerate(spec.half_widths()):
        n = int(round(2 * half * resolution))
        _check_coarse(n, f"axis {i}")
        axes.append(_axis_nodes(half, n))
        spacing.append(2 * half / n)
    return Grid(spec, tuple(axes), tuple(spacing))


def _check_coarse(n_intervals, axis_name):
    if n_intervals < MIN_INTERVALS:
        raise ValueError(
            f"resolution too coarse along {axis_name}: {n_intervals} intervals, need at least {MIN_INTERVALS}"
        )


def exhaustion_family(d: float, n: int, m_max: int) -> list[SlabTruncation]:
    """Nested slab truncations for m = 0, ..., m_max."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    return [SlabTruncation(d, m, n) for m in range(m_max + 1)]


def shared_node_index(sub: Grid, sup: Grid, atol: float = 1e-9) -> np.ndarray:
    """Indices into ``sup``'s unknowns of every unknown node of ``sub``.

    Raises ValueError unless every interior node of ``sub`` is also a node of
    ``sup``.
    """
    if sub.radial or sup.radial or len(sub.axes) != len(sup.axes):
        raise ValueError("node sharing is defined only between tensor grids of equal dimension")
    per_axis = []
    for a_sub, a_sup in zip(sub.interior_axes(), sup.interior_axes()):
        idx = np.searchsorted(a_sup, a_sub - atol)
        if np.any(idx >= a_sup.size) or np.any(np.abs(a_sup[np.minimum(idx, a_sup.size - 1)] - a_sub) > atol):
            raise ValueError("grids are not node-aligned")
        per_axis.append(idx)
    mesh = np.meshgrid(*per_axis, indexing="ij")
    return np.ravel_multi_index(tuple(m.ravel() for m in mesh), sup.shape)


def window_index(grid: Grid, half_widths: Sequence[float], atol: float = 1e-9) -> np.ndarray:
    """Unknown indices of nodes lying in the closed box with ``half_widths``."""
    pts = grid.points()
    inside = np.all(np.abs(pts) <= np.asarray(half_widths) + atol, axis=1)
    return np.flatnonzero(inside)
