"""Exception hierarchy shared by the optoloc modules."""


class OptolocError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OptolocError, ValueError):
    """An argument lies outside the domain of the model or formula."""


class OutOfValidityError(DomainError):
    """A frequency (or similar) lies outside the model's validity band."""


class MeasurementInconsistentError(OptolocError, ValueError):
    """A received message implies a physically impossible measurement."""


class ConvergenceError(OptolocError, ArithmeticError):
    """An iterative solver hit its iteration cap."""


class GeometryError(OptolocError, ValueError):
    """Reference positions cannot determine a unique fix."""


class InsufficientMeasurementsError(GeometryError):
    pass


class CollinearGeometryError(GeometryError):
    pass


class DegenerateMotionError(GeometryError):
    pass


class ConfigurationError(OptolocError, ValueError):
    """A scenario file or CLI argument is invalid."""
