"""Exception hierarchy; each family maps to a CLI exit code."""


class GQRError(Exception):
    exit_code = 1
    category = "error"


class ConfigurationError(GQRError, ValueError):
    """Invalid parameters, unknown keys or unit tags, violated constraints."""

    exit_code = 2
    category = "config"


class NumericalError(GQRError, ArithmeticError):
    exit_code = 3
    category = "numerical"


class SingularityError(NumericalError):
    """Field evaluated at (or numerically on top of) a point source."""


class IntegrationError(NumericalError):
    """Trajectory integration failed: step-size underflow or non-finite state."""


class OutputError(GQRError, OSError):
    exit_code = 4
    category = "io"
