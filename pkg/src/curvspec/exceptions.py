"""Exception hierarchy shared across the package."""


class CurvspecError(Exception):
    """Base class for all package errors."""


class DomainError(CurvspecError, ValueError):
    """A point or curvature lies outside the valid domain of a chart."""


class UnsupportedConversion(CurvspecError, ValueError):
    pass


class DegenerateTriangle(CurvspecError, ValueError):
    pass


class DegenerateGeodesic(CurvspecError, ValueError):
    pass


class PointNotOnGeodesic(CurvspecError, ValueError):
    pass


class UnsupportedKind(CurvspecError, ValueError):
    pass


class MeshFailure(CurvspecError, RuntimeError):
    pass


class AssemblyError(CurvspecError, RuntimeError):
    pass


class ZeroVector(CurvspecError, ValueError):
    pass


class InsufficientPairs(CurvspecError, ValueError):
    pass


class ShapeMismatch(CurvspecError, ValueError):
    pass


class RadiiOutsideTriangle(CurvspecError, ValueError):
    pass


class NoConvergence(CurvspecError, RuntimeError):
    """The eigensolver did not converge; partial results are attached."""

    def __init__(self, message, max_iterations=None, values=None, vectors=None, residuals=None):
        super().__init__(message)
        self.max_iterations = max_iterations
        self.values = values
        self.vectors = vectors
        self.residuals = residuals


class StepFailure(CurvspecError, RuntimeError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConfigError(CurvspecError, ValueError):
    pass
