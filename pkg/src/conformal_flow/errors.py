class ConformalFlowError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ConformalFlowError, ValueError):
    """A family parameter lies outside the region where the family exists."""


class IndexOutOfRange(ConformalFlowError, IndexError):
    pass


class TailOverflow(ConformalFlowError):
    """The truncation is too small to represent the computed sequence."""


class TruncationTooSmall(ConformalFlowError):
    pass


class NoConvergence(ConformalFlowError):
    """Newton iteration (or continuation) failed to converge.

    `parameter` carries the continuation parameter at which the failure
    occurred, when known.
    """

    def __init__(self, message, parameter=None, residual=None):
        super().__init__(message)
        self.parameter = parameter
        self.residual = residual


class SingularJacobian(NoConvergence):
    pass


class UnknownBranch(ConformalFlowError, ValueError):
    pass


class IndeterminateIndex(ConformalFlowError):
    """L+ has a zero eigenvalue, so the constrained index formula does not apply."""


class NoConvergenceEig(ConformalFlowError):
    pass


class BlowUp(ConformalFlowError):
    pass
