"""Exception and warning classes shared across the package."""


class SymflatError(Exception):
    """Base class for all package errors."""


class DomainMismatchError(SymflatError):
    pass


class AlgebraMismatchError(SymflatError):
    pass


class DegreeError(SymflatError):
    """Form degree outside the range an operation accepts."""


class DegreeOverflowError(DegreeError):
    pass


class MissingDerivativeError(SymflatError):
    """Point-cloud form without an attached closed-form derivative table."""


class MetricError(SymflatError):
    pass


class NotPrimitiveError(SymflatError):
    pass


class DegenerateZetaError(SymflatError):
    pass


class DimensionError(SymflatError):
    pass


class InvalidConnectionError(SymflatError):
    """Invalid connection data (non-closed flux, flux on a non-abelian bundle, ...)."""


class GaugeError(SymflatError):
    pass


class ConsistencyError(SymflatError):
    """An internal identity that should hold to round-off did not."""


class ConvergenceError(SymflatError):
    pass


class StepUnderflowError(SymflatError):
    pass


class FlowDivergedError(SymflatError):
    pass


class ClassificationError(SymflatError):
    pass


class SceneError(SymflatError):
    pass


class DimensionTooSmallWarning(UserWarning):
    pass


class NotCriticalWarning(UserWarning):
    pass


class NotClosedError(SymflatError):
    """A 2-form declared closed failed its closedness certificate."""
