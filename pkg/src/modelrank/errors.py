"""Exception types shared across the engine."""


class ModelRankError(Exception):
    """Base class for all engine errors."""


class ValidationFailure(ModelRankError):
    """An operation was handed data that fails its validation rules.

    Carries the full list of violations so callers can report every
    problem at once instead of the first one found.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)

    def __str__(self):
        base = super().__str__()
        if self.violations:
            return base + "\n  - " + "\n  - ".join(self.violations)
        return base


class ConvergenceError(ModelRankError):
    """Power iteration did not reach the requested tolerance."""


class ScaleError(ModelRankError):
    """A value cannot be mapped through a categorical scale."""


class ScenarioError(ModelRankError):
    """A scenario document cannot be parsed or is structurally malformed."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location

    def __str__(self):
        base = super().__str__()
        if self.location:
            return f"{base} (at {self.location})"
        return base
