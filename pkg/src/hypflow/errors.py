"""Exception types shared across the package."""


class HypflowError(Exception):
    """Base class for all hypflow-specific errors."""


class DomainError(HypflowError):
    """A closed-form Gaussian integral was requested outside its convergence domain."""


class AccuracyError(HypflowError):
    """Adaptive quadrature failed to stabilize before hitting the node cap."""


class EvaluatorMismatchError(HypflowError):
    """Two independent evaluators of the same quantity disagree beyond tolerance."""


class InequalityViolationError(HypflowError):
    """An asserted inequality failed; carries the witness for reporting."""

    def __init__(self, message, lhs=None, rhs=None, witness=None):
        super().__init__(message)
        self.lhs = lhs
        self.rhs = rhs
        self.witness = witness
