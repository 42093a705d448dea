"""Exception types shared across the package."""


class SharpprojError(Exception):
    """Base class for library errors."""


class DimensionMismatch(SharpprojError, ValueError):
    """Operands live in different coordinate spaces."""


class InvalidInput(SharpprojError, ValueError):
    """Input violates a documented precondition (NaN, bad range, ...)."""


class ConvergenceError(SharpprojError, RuntimeError):
    """An iterative routine hit its iteration cap."""


class CapsExceeded(SharpprojError, ValueError):
    """Instance is larger than the desk-scale contract of an enumeration oracle."""


class InfeasibleProblem(SharpprojError, ValueError):
    """The constraint system has no solution."""


class UnboundedProblem(SharpprojError, ValueError):
    """The linear program has no finite optimum."""


class CertificateError(SharpprojError, RuntimeError):
    """An optimality certificate failed to validate."""
