"""Exception types raised by the library.

The CLI maps :class:`NumericalError` subclasses to exit code 2 and everything
else derived from :class:`BreginterpError` to exit code 1.
"""


class BreginterpError(Exception):
    """Base class for all library errors."""


class ProblemError(BreginterpError, ValueError):
    """Invalid problem data (shapes, exponents, labels, zero rows)."""


class NumericalError(BreginterpError, RuntimeError):
    """A numerical diagnostic: divergence, singular systems, bad references."""


class UnboundedDualError(NumericalError):
    """The dual objective grew past its ceiling; the primal is likely infeasible."""


class SingularSystemError(NumericalError):
    """A dense linear system in an oracle was singular or could not be solved
    to the required residual."""


class InvalidReferenceError(NumericalError):
    """A reference optimum is inconsistent with an observed dual value."""


class NotConvergedError(NumericalError):
    """An iterative oracle exhausted its budget.

    The best-so-far result is attached as ``reference``.
    """

    def __init__(self, message, reference=None):
        super().__init__(message)
        self.reference = reference


class RejectionBudgetError(NumericalError):
    """Rejection sampling ran out of draws before filling the quota."""
