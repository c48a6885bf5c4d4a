"""
Explicit subsolutions for seeding monotone iterations.

``radial_w`` is the closed-form solution of

    -(r^{n-1} w')' = ε r^{n-1} (1 - r^2),   w'(0) = 0,  w(1) = 0,

which satisfies ``-Δw <= w^p`` on the unit ball once ε is at most
``epsilon_max(n, p)``.  ``glued_z`` follows w out to radius 1 - η, glues a
quintic ω down to zero at radius 1 + η' (matching value, first and second
derivative at both ends) and vanishes beyond, giving a compactly supported
subsolution that fits inside thin domains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Field, Grid, as_values
from .errors import SubsolutionError
from .poisson import assemble_laplacian

__all__ = [
    "RadialProfile",
    "GluedProfile",
    "SubsolutionCheck",
    "radial_w",
    "epsilon_max",
    "glued_z",
    "verify_subsolution",
    "SUBSOLUTION_TOL",
]

SUBSOLUTION_TOL = 1e-8


@dataclass(frozen=True)
class RadialProfile:
    """``w(r) = a [n/(n+4) r^4 - 2(n+2)/(n+4) r^2 + 1]``, ``a = ε(n+4)/(4n(n+2))``."""

    n: int
    eps: float

    @property
    def amplitude(self) -> float:
        n = self.n
        return self.eps * (n + 4) / (4.0 * n * (n + 2))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        n = self.n
        return self.amplitude * (n / (n + 4) * r**4 - 2 * (n + 2) / (n + 4) * r**2 + 1.0)

    def derivative(self, r, order: int = 1):
        r = np.asarray(r, dtype=float)
        n, a = self.n, self.amplitude
        if order == 1:
            return a * (4 * n / (n + 4) * r**3 - 4 * (n + 2) / (n + 4) * r)
        if order == 2:
            return a * (12 * n / (n + 4) * r**2 - 4 * (n + 2) / (n + 4))
        if order == 3:
            return a * (24 * n / (n + 4) * r)
        raise ValueError("order must be 1, 2 or 3")

    def source(self, r):
        """``ε (1 - r^2)``, which equals ``-Δw``."""
        r = np.asarray(r, dtype=float)
        return self.eps * (1.0 - r**2)

    def lower_bound(self, r):
        r = np.asarray(r, dtype=float)
        return self.amplitude * (1.0 - r**2) ** 2

    def on_grid(self, grid: Grid) -> Field:
        """Seed field: w inside the unit ball, 0 outside."""
        r = grid.radius()
        return Field(grid, np.where(r < 1.0, self(np.minimum(r, 1.0)), 0.0))


def radial_w(n: int, eps: float) -> RadialProfile:
    if not eps > 0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return RadialProfile(int(n), float(eps))


def epsilon_max(n: int, p: float) -> float:
    """Largest source amplitude with ``ε(1 - r^2) <= w^p``: ``((n+4)/(4n(n+2)))^{p/(1-p)}``."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return ((n + 4) / (4.0 * n * (n + 2))) ** (p / (1.0 - p))


def _quintic_glue(left_value, left_d1, left_d2, length):
    """Coefficients (in s = r - r_in) of the quintic with prescribed
    value/first/second derivative at s = 0 and zeros at s = length."""
    c0, c1, c2 = left_value, left_d1, left_d2 / 2.0
    L = length
    # remaining c3, c4, c5 from value, d1, d2 vanishing at s = L
    A = np.array([[L**3, L**4, L**5],
                  [3 * L**2, 4 * L**3, 5 * L**4],
                  [6 * L, 12 * L**2, 20 * L**3]])
    rhs = -np.array([c0 + c1 * L + c2 * L**2, c1 + 2 * c2 * L, 2 * c2])
    c3, c4, c5 = np.linalg.solve(A, rhs)
    return np.array([c0, c1, c2, c3, c4, c5])


@dataclass(frozen=True, eq=False)
class GluedProfile:
    inner: RadialProfile
    r_in: float
    r_out: float
    coeffs: np.ndarray  # quintic in s = r - r_in

    @property
    def n(self) -> int:
        return self.inner.n

    def omega(self, r, order: int = 0):
        poly = np.polynomial.Polynomial(self.coeffs)
        if order:
            poly = poly.deriv(order)
        return poly(np.asarray(r, dtype=float) - self.r_in)

    def __call__(self, r, order: int = 0):
        r = np.asarray(r, dtype=float)
        inner = self.inner(r) if order == 0 else self.inner.derivative(r, order)
        return np.where(r <= self.r_in, inner, np.where(r < self.r_out, self.omega(r, order), 0.0))

    def radial_laplacian(self, r):
        """Continuum ``-Δz`` as a function of r (r > 0)."""
        r = np.asarray(r, dtype=float)
        return -(self(r, 2) + (self.n - 1) / r * self(r, 1))

    def jumps(self) -> dict:
        """Value and derivative mismatches at the two glue radii."""
        out = {}
        for k in range(3):
            w_k = self.inner(self.r_in) if k == 0 else self.inner.derivative(self.r_in, k)
            out[f"inner_d{k}"] = float(abs(self.omega(self.r_in, k) - w_k))
            out[f"outer_d{k}"] = float(abs(self.omega(self.r_out, k)))
        return out

    def on_grid(self, grid: Grid) -> Field:
        return Field(grid, self(grid.radius()))


@dataclass(frozen=True)
class SubsolutionCheck:
    passed: bool
    worst_violation: float
    worst_node: tuple | None


def _profile_values(profile, grid):
    if hasattr(profile, "on_grid"):
        return profile.on_grid(grid).values
    if isinstance(profile, Field) or isinstance(profile, np.ndarray):
        return as_values(profile, grid)
    if callable(profile):
        return np.asarray(profile(grid.radius()), dtype=float)
    return as_values(profile, grid)


def verify_subsolution(profile, p: float, grid: Grid, tol: float = SUBSOLUTION_TOL) -> SubsolutionCheck:
    """Check the discrete inequality ``-Δ_h z <= z^p`` at every unknown node.

    ``profile`` may be a RadialProfile/GluedProfile, a Field or array of
    node values, or a callable of the radius.
    """
    z = _profile_values(profile, grid)
    op = assemble_laplacian(grid)
    excess = op.apply(z) - np.maximum(z, 0.0) ** p
    if excess.size == 0:
        return SubsolutionCheck(True, 0.0, None)
    k = int(np.argmax(excess))
    worst = float(excess[k])
    node = tuple(float(x) for x in grid.points()[k])
    return SubsolutionCheck(worst <= tol, worst, node)


def glued_z(n: int, p: float, eta: float = 0.1, eta_prime: float = 0.1, grid: Grid | None = None,
            safety: float = 0.75, samples: int = 4001) -> GluedProfile:
    """Compactly supported subsolution of ``-Δz <= z^p``, supported in D_{1+η'}.

    The inner amplitude is ``safety * epsilon_max(n, p)``.  Shape
    requirements (ω nonnegative and nonincreasing) are checked on a dense
    radial sample; when ``grid`` is given the discrete inequality is checked
    on it too.

    Raises
    ------
    SubsolutionError
        When a shape or subsolution check fails.  Shrinking η, η' or the
        safety factor usually helps.
    """
    if not 0 < p <= 0.5:
        raise ValueError(f"p must lie in (0, 1/2], got {p!r}")
    if not (0 < eta <= 0.2 and 0 < eta_prime <= 0.2):
        raise ValueError("eta and eta_prime must lie in (0, 0.2]")
    inner = radial_w(n, safety * epsilon_max(n, p))
    r_in, r_out = 1.0 - eta, 1.0 + eta_prime
    coeffs = _quintic_glue(float(inner(r_in)), float(inner.derivative(r_in, 1)),
                           float(inner.derivative(r_in, 2)), r_out - r_in)
    profile = GluedProfile(inner, r_in, r_out, coeffs)

    r = np.linspace(r_in, r_out, samples)
    scale = inner.amplitude
    values = profile.omega(r)
    slopes = profile.omega(r, 1)
    if np.min(values) < -1e-12 * scale:
        k = int(np.argmin(values))
        raise SubsolutionError("glue profile goes negative", float(values[k]), (float(r[k]),))
    if np.max(slopes) > 1e-12 * scale:
        k = int(np.argmax(slopes))
        raise SubsolutionError("glue profile is not nonincreasing", float(slopes[k]), (float(r[k]),))

    if grid is not None:
        if grid.radial:
            if not grid.domain.radius > r_out:
                raise ValueError("the ball grid must contain the closed support disc")
        elif not min(grid.domain.half_widths()) > r_out:
            raise ValueError("the grid's domain must contain the closed support disc D_{1+eta'}")
        check = verify_subsolution(profile, p, grid)
        if not check.passed:
            raise SubsolutionError(
                f"discrete subsolution check failed: worst excess {check.worst_violation:.3e} at {check.worst_node}",
                check.worst_violation, check.worst_node,
            )
    return profile

