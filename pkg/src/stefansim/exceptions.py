"""Exception hierarchy shared by all modules."""


class StefanError(Exception):
    """Base class for errors raised by stefansim."""


class DomainError(StefanError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SpecError(StefanError, ValueError):
    """Invalid physical problem data or configuration."""


class ModelDomainError(StefanError, ValueError):
    """A coefficient function became non-positive where it must be positive."""


class QuadratureError(StefanError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class ConvergenceError(StefanError, ArithmeticError):
    """A fixed-point iteration exhausted its iteration budget."""

    def __init__(self, message, profile=None, ratios=None, iterations=0):
        super().__init__(message)
        self.profile = profile
        self.ratios = list(ratios or [])
        self.iterations = iterations


class NoRootError(StefanError):
    """No admissible free-boundary coefficients were found.

    ``trace`` carries whatever diagnostics were gathered (residual scan,
    J-function curves) so callers can report them.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or {}
