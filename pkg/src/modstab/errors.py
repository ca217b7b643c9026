"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad configuration: wrong dimensions, unknown presets, invalid values."""


class InvalidModularError(ValueError):
    """A functional that claims to be a modular but provably is not."""


class UnsupportedModularError(ValueError):
    """Operation requires properties (e.g. convexity) the modular lacks."""


class BracketDivergenceError(RuntimeError):
    """Bisection could not bracket its root within the magnitude cap."""


class OutOfDiscError(ValueError):
    """Scalar outside the disc where the unimodular decomposition exists."""


class PreconditionError(ValueError):
    """Caller-supplied data violates a documented precondition."""


class NonFiniteValueError(RuntimeError):
    """An evaluation produced NaN or infinity."""

    def __init__(self, message, probe_id=None, level=None):
        super().__init__(message)
        self.probe_id = probe_id
        self.level = level


class OverflowAbort(RuntimeError):
    """Scaled iteration left the configured magnitude cap."""

    def __init__(self, message, level, probe_id):
        super().__init__(message)
        self.level = level
        self.probe_id = probe_id
