from typing import Optional

CONFIG_EXIT_CODE = 2
NUMERICAL_EXIT_CODE = 3


class PertlabError(Exception):
    """Base class for every error the lab raises on purpose"""
    exit_code = NUMERICAL_EXIT_CODE


class ConfigurationError(PertlabError, ValueError):
    exit_code = CONFIG_EXIT_CODE


class DomainError(ConfigurationError):
    """Abscissa outside the half line [0, inf)"""


class MissingOrderError(ConfigurationError):
    """Lower orders of the hierarchy have not been computed yet"""


class DegenerateGridError(ConfigurationError):
    """σ grid cannot support the requested extrapolation"""


class PerturbationParseError(ConfigurationError):
    def __init__(self, message: str, column: Optional[int] = None):
        self.column = column
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)


class ParityError(PerturbationParseError):
    def __init__(self, power: int, column: Optional[int] = None):
        self.power = power
        super().__init__(f"parity violation: odd power x^{power}", column)


class OverflowGuardError(PertlabError, OverflowError):
    def __init__(self, x_cut: float, x_max: float):
        self.x_cut = x_cut
        self.x_max = x_max
        super().__init__(f"cutoff too large for scalar precision: {x_cut!r} > {x_max!r}")


class QuadratureError(PertlabError, ArithmeticError):
    """Integrator failed, ran out of steps or produced a non-finite state"""
