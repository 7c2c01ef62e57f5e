"""Exception hierarchy shared by all askls modules."""


class AskLsError(Exception):
    """Base class for every error raised by askls."""

    category = "error"


class ConfigError(AskLsError, ValueError):
    category = "config"


class DataError(AskLsError, ValueError):
    """Malformed or inconsistent input data (bad file lines, bad labels...)."""

    category = "data"


class DimensionMismatch(DataError):
    pass


class SingleClassLabels(DataError):
    pass


class KernelError(AskLsError, ValueError):
    """A kernel could not be evaluated on the given inputs."""

    category = "data"


class NumericalError(AskLsError, ArithmeticError):
    category = "numerical"


class SingularSystem(NumericalError):
    """The dual linear system is (numerically) singular.

    ``rcond`` holds the reciprocal condition estimate of the system matrix.
    """

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class ResidualTooLarge(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AsymmetricInput(DataError):
    """A symmetric-only solver (classical LS-SVM) received an asymmetric kernel."""
