"""
slabsolve: iteration schemes for ``-Δu = λ f(u) + h`` on bounded domains
and on slabs, with the a priori bounds that certify them.
"""

from .bounds import (
    bratu_lambda_star,
    conformal_threshold,
    contraction_hypothesis,
    holder_bound,
    lambert_w,
    max_principle_constant,
    optimize_theta,
    staircase_max_exponent,
    sublinear_feasible,
    sublinear_norm_bound,
)
from .domain import Box, Field, Grid, Interval, RadialBall, SlabTruncation, discretize, exhaustion_family
from .errors import (
    ConfigError,
    ConvergenceError,
    HypothesisError,
    MonotonicityError,
    SlabSolveError,
    SubsolutionError,
)
from .exhaustion import ExhaustionRun, solve_on_slab, window_convergence_report
from .iterate import Problem, iterate_contraction, iterate_monotone, iterate_system, residual
from .nonlinearity import Nonlinearity, catalog
from .poisson import assemble_laplacian, check_discrete_max_principle, poisson_solve
from .subsolution import epsilon_max, glued_z, radial_w, verify_subsolution

__version__ = "0.1.0"
