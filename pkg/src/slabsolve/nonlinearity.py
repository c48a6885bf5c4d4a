"""
Nonlinearities ``f`` for ``-Δu = λ f(u) + h`` and their metadata.

The catalog holds the nonlinearities the experiments use:

========== ===================================== ==========================
name       value                                 class
========== ===================================== ==========================
exp        e^u                                   differentiable
exp2       e^{2u}                                differentiable
power      max(u, 0)^p                           Hölder (p < 1), else C^1
staircase  s(u)^p, s(u) = l on (l/10, (l+1)/10]  lower semicontinuous
========== ===================================== ==========================

The Bratu problem is posed here as ``-Δu = λ e^u`` with λ >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["Nonlinearity", "catalog", "staircase_level", "CATALOG_NAMES"]

CATALOG_NAMES = ("exp", "exp2", "power", "staircase")


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """Evaluator bundle for ``f``.

    Attributes
    ----------
    value : callable
        Vectorized ``f``.
    derivative : callable or None
        Vectorized ``f'`` when ``f`` is differentiable.
    continuity : str
        ``"differentiable"``, ``"holder"`` or ``"lsc"``.
    holder : (alpha, seminorm) or None
        Hölder exponent in (0, 1) and an upper bound for the seminorm.
    growth : (K, p) or None
        Constants with ``f(s) <= K s^p`` for ``s >= 0``.
    nondecreasing, nonnegative : bool
    derivative_nondecreasing : bool
        Lets extrema of ``f'`` over an interval be read at the right endpoint.
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    continuity: str = "differentiable"
    holder: tuple[float, float] | None = None
    growth: tuple[float, float] | None = None
    nondecreasing: bool = False
    nonnegative: bool = False
    derivative_nondecreasing: bool = False
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.continuity not in ("differentiable", "holder", "lsc"):
            raise ValueError(f"unknown continuity class {self.continuity!r}")
        if self.continuity == "differentiable" and self.derivative is None:
            raise ValueError("differentiable nonlinearity needs a derivative")
        if self.holder is not None:
            alpha, seminorm = self.holder
            if not 0 < alpha < 1 or seminorm < 0:
                raise ValueError("Hölder data needs alpha in (0, 1) and a nonnegative seminorm")

    def __call__(self, u):
        return self.value(np.asarray(u, dtype=float))

    def spot_check(self, lo: float, hi: float, n_pairs: int = 10_000, seed: int = 0) -> dict:
        """Sample the declared Hölder and growth bounds on ``[lo, hi]``.

        Returns the largest observed ratio for each declared bound; a ratio
        above 1 means the metadata is wrong.
        """
        rng = np.random.default_rng(seed)
        out = {}
        if self.holder is not None:
            alpha, seminorm = self.holder
            x = rng.uniform(lo, hi, n_pairs)
            y = rng.uniform(lo, hi, n_pairs)
            keep = x != y
            diff = np.abs(self(x[keep]) - self(y[keep]))
            out["holder_ratio"] = float(np.max(diff / (seminorm * np.abs(x[keep] - y[keep]) ** alpha)))
        if self.growth is not None:
            K, p = self.growth
            s = rng.uniform(max(lo, 0.0), hi, n_pairs)
            s = s[s > 0]
            out["growth_ratio"] = float(np.max(self(s) / (K * s**p)))
        return out


def staircase_level(x) -> np.ndarray:
    """Integer step ``l`` with ``l/10 < x <= (l+1)/10``; 0 on ``x <= 1/10``.

    Intervals are left-open and right-closed exactly, including at the
    decimal breakpoints: ``staircase_level(0.3) == 2``.
    """
    x = np.asarray(x, dtype=float)
    level = np.ceil(x * 10.0) - 1.0
    # 10 * x rounds, so compare against the breakpoints l / 10 themselves
    level = np.where(x <= level / 10.0, level - 1.0, level)
    level = np.where(x > (level + 1.0) / 10.0, level + 1.0, level)
    return np.maximum(level, 0.0)


def _exp(scale):
    def value(u):
        return np.exp(scale * u)

    def derivative(u):
        return scale * np.exp(scale * u)

    return value, derivative


def catalog(name: str, **params) -> Nonlinearity:
    """Build a catalog nonlinearity.

    Examples
    --------
    >>> float(catalog("power", p=0.5)(4.0))
    2.0
    >>> float(catalog("staircase", p=1)(0.25))
    2.0
    """
    if name == "exp":
        value, deriv = _exp(1.0)
        return Nonlinearity(value, deriv, nondecreasing=True, nonnegative=True,
                            derivative_nondecreasing=True, name="exp")
    if name == "exp2":
        value, deriv = _exp(2.0)
        return Nonlinearity(value, deriv, nondecreasing=True, nonnegative=True,
                            derivative_nondecreasing=True, name="exp2")
    if name == "power":
        p = float(params.get("p", 0.5))
        if p <= 0:
            raise ValueError("power nonlinearity needs p > 0")

        def value(u):
            return np.maximum(u, 0.0) ** p

        if p < 1:
            return Nonlinearity(value, None, "holder", holder=(p, 1.0), growth=(1.0, p),
                                nondecreasing=True, nonnegative=True, name="power", params={"p": p})

        def deriv(u):
            return p * np.maximum(u, 0.0) ** (p - 1)

        return Nonlinearity(value, deriv, "differentiable", growth=(1.0, p), nondecreasing=True,
                            nonnegative=True, derivative_nondecreasing=True, name="power", params={"p": p})
    if name == "staircase":
        p = float(params.get("p", 1.0))
        if p <= 0:
            raise ValueError("staircase nonlinearity needs p > 0")

        def value(u):
            return staircase_level(u) ** p

        return Nonlinearity(value, None, "lsc", growth=(10.0**p, p), nondecreasing=True,
                            nonnegative=True, name="staircase", params={"p": p})
    raise ValueError(f"unknown nonlinearity {name!r}; expected one of {', '.join(CATALOG_NAMES)}")

