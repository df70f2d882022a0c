"""Exception hierarchy shared by the analytic pipeline and the simulator."""


class GLEKinError(Exception):
    """Base class for all package errors."""


class ValidationError(GLEKinError, ValueError):
    """A parameter or configuration value is out of range."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field} {message}")


class DomainError(GLEKinError, ValueError):
    """A function was evaluated outside its domain (negative time, kernel pole)."""


class NumericalError(GLEKinError, ArithmeticError):
    """A numerical step failed or could not be trusted."""


class ConfluentPolesError(NumericalError):
    pass


class ResonanceError(NumericalError):
    pass


class AccuracyError(NumericalError):
    """Requested tolerance not reached; ``estimate`` holds the best value found."""

    def __init__(self, message, estimate=None, error=None):
        self.estimate = estimate
        self.error = error
        super().__init__(message)


class CovarianceError(NumericalError):
    """Noise covariance matrix is not positive semidefinite."""

    def __init__(self, message, min_eigenvalue):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(message)
