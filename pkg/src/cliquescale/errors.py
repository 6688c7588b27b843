"""Exception types shared across the package."""


class CliqueScaleError(Exception):
    pass


class MalformedInputError(CliqueScaleError, ValueError):
    """Graph or vertex-set input that does not describe a valid object."""


class ParameterError(CliqueScaleError, ValueError):
    """A model, formula or layout parameter outside its admissible domain."""


class InfeasibleLayoutError(ParameterError):
    """Witness geometry cannot be realized for the requested parameters."""


class CalibrationError(CliqueScaleError, RuntimeError):
    def __init__(self, message, achieved_range=None):
        super().__init__(message)
        self.achieved_range = achieved_range


class PartialCountError(CliqueScaleError, RuntimeError):
    """Enumeration stopped early; ``census`` holds what was counted so far."""

    def __init__(self, message, census=None):
        super().__init__(message)
        self.census = census


class BudgetExceeded(PartialCountError):
    pass


class OracleRefusal(ParameterError):
    """Input too large for an exponential-time reference oracle."""
