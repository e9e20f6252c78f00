"""Semantic exception hierarchy.

Public functions raise these instead of bare ValueError/RuntimeError so the
CLI can map failure classes to exit codes (validation -> 2, numerical -> 3).
"""


class SteinMLEError(Exception):
    """Base class for all package errors."""


class DomainError(SteinMLEError, ValueError):
    """An input violates a documented precondition."""


class UnknownModelError(DomainError):
    """A model name is not in the registry."""


class DegenerateSampleError(SteinMLEError, ValueError):
    """A sample cannot support the requested estimate (e.g. zero mean)."""


class ConvergenceError(SteinMLEError, RuntimeError):
    """An iterative numerical routine failed to reach its tolerance.

    Carries enough state (`details`) to diagnose: bracket endpoints for root
    finders, achieved error estimates for quadrature.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details
