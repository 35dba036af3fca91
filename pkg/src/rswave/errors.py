"""Exception types shared across the package.

Everything derives from ValueError so callers that only want a coarse
"bad input" signal can catch one base class.
"""


class EmptyGridError(ValueError):
    """The low-frequency cutoff removed every lattice mode."""


class SingularModeError(ValueError):
    """A spectral multiplier with a negative frequency power hit DC content."""


class StabilityError(ValueError):
    """Requested leapfrog step exceeds the stable limit for this grid."""


class UndefinedRatioError(ValueError):
    """Frequency-weight ratio requested for a state with zero photon content."""


class ScenarioParseError(ValueError):
    """Scenario text could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ScenarioValidationError(ValueError):
    """Scenario parsed but failed validation. Carries the offending key."""

    def __init__(self, message: str, key: str):
        super().__init__(f"{key}: {message}")
        self.key = key
