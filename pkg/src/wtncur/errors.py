"""Exception types shared across the package.

The CLI maps these onto exit codes: data errors -> 1, parameter errors -> 2.
"""


class TradeDataError(ValueError):
    """Invalid or unusable input data (bad records, unknown codes, empty years)."""


class ParameterError(ValueError):
    """Invalid configuration or function parameter."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to reach the requested residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class FrozenCountryError(RuntimeError):
    """An update was requested for a seed country whose preference is fixed."""
