"""Exception hierarchy shared by the numerical modules and the CLI."""


class ErgodicError(Exception):
    """Base class for all package errors."""


class RegistryError(ErgodicError, KeyError):
    """Unknown symbol or test-function spec string."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InputError(ErgodicError, ValueError):
    """Invalid argument (non-Hermitian input, p < 1, bad size...)."""


class DimensionError(InputError):
    pass


class NumericalError(ErgodicError, ArithmeticError):
    """A numerical procedure did not deliver a trustworthy value."""


class EvaluationDomainError(NumericalError):
    """A function produced non-finite values on its sampling grid."""


class ToleranceError(NumericalError):
    """An iterative refinement did not reach its tolerance.

    ``estimate`` carries the last value computed.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class TruncationError(NumericalError):
    """A truncated infinite object did not stabilise.

    ``residual`` is the last change observed and ``history`` the sequence of
    successive values, when available.
    """

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history) if history is not None else []
