"""
Versioned table of expected values consulted by the experiments.

Each entry is labeled ``"reported"`` (a number quoted by the source
analysis, checked at its stated precision) or ``"derived"`` (computed here
from a closed form or recorded from a reference run, used as a regression
oracle).  ``audit`` entries are shown next to the computed value but never
gate the exit code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Expectation", "EXPECTATIONS", "EXPECTATIONS_VERSION", "check"]

EXPECTATIONS_VERSION = "2026.10.1"


@dataclass(frozen=True)
class Expectation:
    value: float
    tol: float
    label: str  # "reported" or "derived"
    kind: str = "approx"  # "approx", "min", "max" or "audit"
    note: str = ""

    def holds(self, x: float) -> bool:
        if x is None or not math.isfinite(x):
            return False
        if self.kind == "approx":
            return abs(x - self.value) <= self.tol
        if self.kind == "min":
            return x >= self.value - self.tol
        if self.kind == "max":
            return x <= self.value + self.tol
        return True


EXPECTATIONS: dict[str, Expectation] = {
    "bratu_lambda_star_n2_half": Expectation(1.13429, 1e-4, "reported", note="λ* at n = 2, θ = 1/2"),
    "conformal_threshold": Expectation(0.1452, 1e-3, "reported"),
    "conformal_argmax_theta": Expectation(0.4130, 5e-3, "reported"),
    "lambda_star_coefficient": Expectation(1.162022, 0.0, "reported", kind="audit",
                                           note="coefficient of n in λ* at the optimal θ"),
    "staircase_exponent_vs_critical": Expectation(1.25, 0.0, "reported", kind="min",
                                                  note="log10(18) against (n+2)/(n-2) at n = 18"),
    "bratu_solve_sup_bound": Expectation(0.5, 1e-6 * 0.5, "derived", kind="max",
                                         note="c||h|| + cΛL/θ with c = 1/4, L = 1, θ = 1/2"),
    # reference-run oracles (default configs)
    "bratu_solve_sup_norm": Expectation(0.316694, 1e-6, "derived", note="n = 2, λ = 1, resolution 2000"),
    "sublinear_sup_norm_n2": Expectation(0.0435005, 1e-6, "derived", note="p = 1/2, n = 2, resolution 400"),
    "lane_emden_ball_sup_norm": Expectation(0.0435005, 1e-6, "derived", note="p = q = 1/2, n = 2, resolution 400"),
    "conformal_slab_sup_norm": Expectation(0.192985, 1e-6, "derived", note="m = 6, resolution 16"),
    "staircase_sup_norm": Expectation(0.621096, 1e-6, "derived", note="n = 2, p = 0.3, resolution 400"),
    "slab_sup_norm": Expectation(0.794986, 1e-6, "derived", note="staircase p = 1, λ = 0.05, h = 1/2, m = 6"),
}


def check(key: str, x: float) -> dict:
    """Comparison record for ``x`` against table entry ``key``."""
    e = EXPECTATIONS[key]
    return {
        "name": key,
        "value": None if x is None else float(x),
        "expected": e.value,
        "tolerance": e.tol,
        "comparison": e.kind,
        "label": e.label,
        "passed": bool(e.holds(x)),
        "gating": e.kind != "audit",
        "note": e.note,
    }
