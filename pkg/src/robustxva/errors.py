"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericalError (and subclasses) -> 4.
"""


class RobustXvaError(Exception):
    pass


class ConfigError(RobustXvaError):
    """Bad or missing run-configuration values."""


class DataError(RobustXvaError):
    """Missing or malformed market data / portfolio files."""


class NumericalError(RobustXvaError):
    """A numerical routine failed to produce a usable result."""


class BootstrapError(NumericalError):
    """A curve pillar could not be solved from its market quote."""


class CalibrationError(NumericalError):
    """Model calibration did not converge.

    Carries the best residual seen so callers can report how close it got.
    """

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class WorstCaseUnavailableError(NumericalError):
    """Worst-case recovery requested from a boundary dual solution."""
