"""Exception types shared across the package."""


class EngineError(Exception):
    """Base class for simulation failures."""


class StructuralError(EngineError):
    """The engine's data structure is inconsistent or would become so.

    Raised for duplicate species, negative counts and similar conditions
    that indicate a broken rule set or corrupted propensities.
    """


class Exhausted(EngineError):
    """No reaction can fire: the total propensity is zero."""


class RuleError(ValueError):
    """A rule set was asked about a specie it does not understand."""


class ConfigError(ValueError):
    """Invalid run configuration."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
