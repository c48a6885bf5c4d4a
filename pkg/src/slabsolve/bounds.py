"""
Explicit constants, thresholds and a priori bounds.

Everything here is a closed-form evaluation or a one-dimensional search;
no PDE is solved.  The maximum-principle constant ``c`` bounds the Dirichlet
solution operator, ``||u|| <= c ||g||``, and every existence condition below
is expressed through it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import Box, DomainSpec, Interval, RadialBall, SlabTruncation, slab_diameter
from .nonlinearity import Nonlinearity

__all__ = [
    "MaxPrincipleConstant",
    "ContractionHypothesis",
    "SublinearHypothesis",
    "max_principle_constant",
    "lambert_w",
    "bratu_lambda_star",
    "bratu_theta_objective",
    "conformal_objective",
    "optimize_theta",
    "conformal_threshold",
    "contraction_hypothesis",
    "holder_bound",
    "sublinear_feasible",
    "staircase_max_exponent",
    "sublinear_norm_bound",
    "sublinear_seed_epsilon",
    "SAMPLES",
]

SAMPLES = 4096
_BRANCH_POINT = -math.exp(-1.0)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MaxPrincipleConstant:
    c: float
    derivation: str  # "generic" or "improved"
    bounded_dims: int
    slab_diameter: float


def max_principle_constant(spec: DomainSpec, improved: bool = False) -> MaxPrincipleConstant:
    """``c`` with ``||u|| <= c ||g||`` for ``-Δu = g``, ``u = 0`` on the boundary.

    The generic value is ``d^2/8`` with ``d`` the slab diameter.  The
    improved value ``d^2/(8k)`` applies when the domain sits inside
    ``D^k_{d/2} x R^{n-k}``; for a ball ``k = n``.  A box only fits in a
    k-ball whose diameter is the diagonal of k of its sides, which never
    beats the generic value, and a slab truncation has ``k = 1``.
    """
    d = slab_diameter(spec)
    generic = MaxPrincipleConstant(d * d / 8.0, "generic", 1, d)
    if not improved:
        return generic
    if isinstance(spec, RadialBall):
        k = spec.dim
        return MaxPrincipleConstant(d * d / (8.0 * k), "improved", k, d)
    if isinstance(spec, (Interval, Box, SlabTruncation)):
        return MaxPrincipleConstant(generic.c, "improved", 1, d)
    raise TypeError(f"unsupported domain {type(spec).__name__}")


def lambert_w(x: float) -> float:
    """Principal branch of the Lambert W function, W(x) e^{W(x)} = x.

    Halley iteration from a branch-point series (x near -1/e), a ``log1p``
    guess (moderate x) or the asymptotic ``log x - log log x`` (large x).

    Raises
    ------
    ValueError
        For ``x < -1/e`` or NaN.

    Examples
    --------
    >>> lambert_w(0.0)
    0.0
    >>> round(lambert_w(math.e), 12)
    1.0
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("lambert_w of NaN")
    if x < _BRANCH_POINT:
        if x < _BRANCH_POINT - 4 * _EPS:
            raise ValueError(f"lambert_w is real only for x >= -1/e, got {x!r}")
        x = _BRANCH_POINT
    if x == 0.0:
        return 0.0
    if x == _BRANCH_POINT:
        return -1.0
    if math.isinf(x):
        return math.inf

    if x < -0.25:
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    elif x < 3.0:
        l1 = math.log1p(x)
        w = l1 * (1.0 - math.log1p(l1) / (2.0 + l1))
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1

    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 4 * _EPS * (1.0 + abs(w)):
            break
    return w


def bratu_lambda_star(n: int, theta: float) -> float:
    """Largest λ for which the contraction condition holds for ``-Δu = λ e^u``
    on the unit ball in R^n, at a given θ: ``2 n θ W((1 - θ)/θ)``."""
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * n * theta * lambert_w((1.0 - theta) / theta)


def bratu_theta_objective(theta: float) -> float:
    """θ W((1 - θ)/θ); the Bratu threshold is ``2n`` times this."""
    return theta * lambert_w((1.0 - theta) / theta)


def conformal_objective(theta: float) -> float:
    """(θ/2) W((1 - θ)/θ), the curvature threshold for ``f = e^{2u}`` at ``c = 1``."""
    return 0.5 * bratu_theta_objective(theta)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_theta(objective: Callable[[float], float], lo: float = 1e-6, hi: float = 1 - 1e-6,
                   iterations: int = 200) -> tuple[float, float]:
    """Maximize a unimodal ``objective`` on ``(0, 1)`` by golden-section search.

    A coarse scan first warns when the objective has more than one local
    maximum; the search then runs in the bracket around the best scan point.

    Returns
    -------
    theta, value
    """
    scan = np.linspace(lo, hi, 65)
    vals = np.array([objective(t) for t in scan])
    peaks = np.sum((vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:]))
    if peaks > 1:
        warnings.warn("objective looks multimodal; golden-section result may be a local maximum", stacklevel=2)
    k = int(np.argmax(vals))
    a, b = scan[max(k - 1, 0)], scan[min(k + 1, scan.size - 1)]

    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(iterations):
        if b - a <= 4 * _EPS:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
    theta = 0.5 * (a + b)
    return float(theta), float(objective(theta))


def conformal_threshold() -> float:
    """max over θ of (θ/2) W((1 - θ)/θ)."""
    return optimize_theta(conformal_objective)[1]


@dataclass(frozen=True)
class ContractionHypothesis:
    """Evaluated contraction condition ``c Λ M <= 1 - θ``.

    ``L`` and ``M`` are maxima of ``|f|`` and ``|f'|``; the signed maxima
    ``L_signed`` and ``M_signed`` are kept alongside.  They coincide for
    nonnegative nondecreasing ``f``.
    """

    theta: float
    lam: float
    h_norm: float
    c: float
    L: float
    M: float
    L_signed: float
    M_signed: float
    satisfied: bool
    a_priori_bound: float

    @property
    def margin(self) -> float:
        return (1.0 - self.theta) - self.c * self.lam * self.M


def _extrema(func, a, b, monotone, samples):
    """(max func, max |func|) over [a, b]."""
    if monotone:
        lo, hi = float(func(np.array(a))), float(func(np.array(b)))
        return max(lo, hi), max(abs(lo), abs(hi))
    x = np.linspace(a, b, samples)
    v = np.asarray(func(x), dtype=float)
    return float(np.max(v)), float(np.max(np.abs(v)))


def contraction_hypothesis(f: Nonlinearity, lam: float, h_norm: float, c: float, theta: float,
                           samples: int = SAMPLES) -> ContractionHypothesis:
    """Evaluate ``L``, ``M``, the condition ``c Λ M <= 1 - θ`` and the bound
    ``c ||h|| + c Λ L / θ``."""
    if f.derivative is None:
        raise ValueError(f"nonlinearity {f.name!r} has no derivative; the contraction scheme needs one")
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    lam = abs(float(lam))
    a = c * h_norm
    # small θ can push b far enough for exp to overflow; M = inf then fails the test
    with np.errstate(over="ignore"):
        L_signed, L = _extrema(f.value, -a, a, f.nondecreasing, samples)
        b = a + lam * c * L / theta
        M_signed, M = _extrema(f.derivative, -b, b, f.derivative_nondecreasing and f.nondecreasing, samples)
    satisfied = bool(c * lam * M <= 1.0 - theta)
    return ContractionHypothesis(theta, lam, h_norm, c, L, M, L_signed, M_signed, satisfied, a + c * lam * L / theta)


def holder_bound(c: float, lam: float, f: Nonlinearity, h_norm: float) -> float:
    """``c Λ |f(c ||h||)| + (c Λ [f]_α)^{1/(1-α)} + c ||h||`` for Hölder ``f``."""
    if f.holder is None:
        raise ValueError(f"nonlinearity {f.name!r} carries no Hölder data with alpha < 1; use the contraction bound")
    alpha, seminorm = f.holder
    if alpha >= 1:
        raise ValueError("Hölder exponent must be < 1")
    lam = abs(float(lam))
    first = c * lam * abs(float(f(c * h_norm)))
    second = (c * lam * seminorm) ** (1.0 / (1.0 - alpha))
    return first + second + c * h_norm


@dataclass(frozen=True)
class SublinearHypothesis:
    K: float
    p: float
    lam: float
    h_norm: float
    c: float
    regime: str  # "sublinear" (p < 1, always feasible) or "conditional" (p >= 1)
    satisfied: bool
    bound: float | None


def _fixed_point_radius(a, b, p, tol=1e-15):
    """Largest R with ``a R^p + b = R``, for ``0 <= p < 1``."""
    if a == 0.0:
        return b

    def g(r):
        return a * r**p + b - r

    lo = 0.0 if b > 0 else 0.5 ** (1.0 / (1.0 - p)) * a ** (1.0 / (1.0 - p))
    hi = max(1.0, 2.0 * lo, b)
    while g(hi) >= 0:
        hi *= 2.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def sublinear_feasible(c: float, lam: float, K: float, p: float, h_norm: float,
                       regime: str | None = None) -> SublinearHypothesis:
    """Existence conditions for ``f(s) <= K s^p`` with nonnegative data.

    For ``p < 1`` a solution always exists and ``bound`` is the fixed-point
    radius ``R = c Λ K R^p + c ||h||``.  For ``p >= 1`` the conditions are
    ``c K Λ <= 1/2`` and ``||h|| <= Λ K``, with bound 1 when they hold.
    ``regime="conditional"`` applies the second test for any p.
    """
    if K < 0 or p < 0:
        raise ValueError("K and p must be nonnegative")
    if regime not in (None, "sublinear", "conditional"):
        raise ValueError(f"unknown regime {regime!r}")
    if regime == "sublinear" and p >= 1:
        raise ValueError("the sublinear regime needs p < 1")
    lam = abs(float(lam))
    if p < 1 and regime != "conditional":
        R = _fixed_point_radius(c * lam * K, c * h_norm, p)
        return SublinearHypothesis(K, p, lam, h_norm, c, "sublinear", True, R)
    # equality cases are the intended use (e.g. d = 2 sqrt 2 gives c = 1 up to rounding)
    slack = 1.0 + 1e-12
    ok = bool(c * K * lam <= 0.5 * slack and h_norm <= lam * K * slack)
    return SublinearHypothesis(K, p, lam, h_norm, c, "conditional", ok, 1.0 if ok else None)


def staircase_max_exponent(n: int) -> float:
    """Largest p with ``10^p / (2n) <= 1/2``, i.e. ``log10 n``."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.log10(n)


def sublinear_seed_epsilon(n: int, p: float, safety: float = 0.75) -> float:
    """Source amplitude of the radial seed, ``safety * ((n+4)/(4n(n+2)))^{p/(1-p)}``."""
    beta = (n + 4) / (4.0 * n * (n + 2))
    return safety * beta ** (p / (1.0 - p))


def sublinear_norm_bound(n: int, p: float) -> float:
    """A priori sup-norm bound for ``-Δu = u^p`` on the unit ball, iterated
    from the radial seed.

    Three terms with ``c = 1/(2n)`` and seed amplitude
    ``ε = (3/4)((n+4)/(4n(n+2)))^{p/(1-p)}``::

        c (c ε)^p + c^{1/(1-p)} + c ε

    The bound is ``O(n^{-1/(1-p)})``.
    """
    if not 0 < p <= 0.5:
        raise ValueError(f"p must lie in (0, 1/2], got {p!r}")
    c = 1.0 / (2.0 * n)
    eps = sublinear_seed_epsilon(n, p)
    return c * (c * eps) ** p + c ** (1.0 / (1.0 - p)) + c * eps
