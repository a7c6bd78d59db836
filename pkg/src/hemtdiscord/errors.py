"""Exception hierarchy.

``ConfigError`` covers anything wrong with user input; every other class is a
``NumericalError`` raised when a well-formed input drives a computation into a
degenerate or non-physical regime. The CLI maps the two families to distinct
exit codes.
"""


class HemtError(Exception):
    """Base class for all package errors."""


class ConfigError(HemtError, ValueError):
    """Invalid, missing or unparseable configuration value."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class NumericalError(HemtError, ArithmeticError):
    """A computation left its domain of validity."""

    stage = "numerics"


class DegenerateNetworkError(NumericalError):
    stage = "params"


class DegenerateSteadyStateError(NumericalError):
    stage = "steady"

    def __init__(self, message, condition=None):
        self.condition = condition
        super().__init__(message)


class ResonanceSingularityError(NumericalError):
    stage = "langevin"

    def __init__(self, message, omega=None):
        self.omega = omega
        super().__init__(message)


class DomainError(NumericalError):
    stage = "gaussian"


class DegenerateChannelError(NumericalError):
    stage = "gaussian"


class NonPhysicalStateError(NumericalError):
    stage = "gaussian"


class DegenerateLevelError(NumericalError):
    stage = "perturbation"
