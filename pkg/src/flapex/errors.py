"""Exception hierarchy shared by all flapex modules."""


class FlapexError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(FlapexError, ValueError):
    pass


class DomainError(FlapexError, ValueError):
    pass


class InputError(FlapexError, ValueError):
    pass


class LabelError(FlapexError, ValueError):
    pass


class ConfigurationError(FlapexError, ValueError):
    pass


class GeometryError(FlapexError, ValueError):
    pass


class SamplingError(FlapexError):
    pass


class ConvergenceError(FlapexError, ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ConsistencyError(FlapexError, AssertionError):
    """Two independent evaluations of the same quantity disagree."""


class PreconditionError(FlapexError, ValueError):
    """A hypothesis of a geometric statement fails; ``which`` names it."""

    def __init__(self, message, which):
        super().__init__(message)
        self.which = which


class RigidityViolation(FlapexError):
    """A sub-configuration that must move rigidly did not."""

    def __init__(self, message, check, residual):
        super().__init__(f"{message} ({check}: {residual:.3e})")
        self.check = check
        self.residual = residual


class OrthogonalityViolation(FlapexError):
    def __init__(self, message, residual):
        super().__init__(f"{message} ({residual:.3e})")
        self.residual = residual
