"""Exception types raised by the solvers and the experiment runner."""


class SlabSolveError(Exception):
    """Base class for all package errors."""


class HypothesisError(SlabSolveError):
    """An existence hypothesis does not hold and the run was not forced."""

    def __init__(self, message, hypothesis=None):
        super().__init__(message)
        self.hypothesis = hypothesis


class ConvergenceError(SlabSolveError):
    """An iteration or linear solve did not reach its tolerance.

    ``report`` carries whatever diagnostics were collected before giving up.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MonotonicityError(ConvergenceError):
    """Iterates that must increase decreased beyond tolerance."""


class SubsolutionError(SlabSolveError):
    """A candidate profile fails the discrete subsolution inequality."""

    def __init__(self, message, worst_violation=None, worst_node=None):
        super().__init__(message)
        self.worst_violation = worst_violation
        self.worst_node = worst_node


class ConfigError(SlabSolveError):
    """An experiment configuration is malformed or incomplete."""
