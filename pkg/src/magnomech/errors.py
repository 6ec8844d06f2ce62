"""Exception types raised by the magnomech package."""


class MagnomechError(Exception):
    """Base class for all package errors."""


class DimensionError(MagnomechError, ValueError):
    pass


class ConvergenceError(MagnomechError, ArithmeticError):
    pass


class SingularMatrixError(MagnomechError, ArithmeticError):
    def __init__(self, message, pivot=0.0):
        super().__init__(message)
        self.pivot = pivot


class InstabilityError(MagnomechError, ArithmeticError):
    def __init__(self, message, max_real_eig=None):
        super().__init__(message)
        self.max_real_eig = max_real_eig


class DomainError(MagnomechError, ValueError):
    pass


class DegenerateParametersError(MagnomechError, ValueError):
    pass


class NotApplicableError(MagnomechError):
    """Raised when a quantity needs the physical drive description."""


class PhysicalityError(MagnomechError, ValueError):
    pass


class NumericalDegeneracyError(MagnomechError, ArithmeticError):
    pass


class EmptyResultError(MagnomechError):
    pass
