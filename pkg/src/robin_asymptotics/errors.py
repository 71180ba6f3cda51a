"""Exception hierarchy shared by all modules."""


class RobinError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RobinError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ValidationError(RobinError, ValueError):
    """A geometric object violates its invariants."""

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class NotInterior(RobinError):
    """The axis direction is not strictly inside the cone."""


class Unbounded(RobinError):
    """The planar section orthogonal to the axis direction is unbounded."""


class OptimizationFailed(RobinError):
    pass


class QuadratureFailure(RobinError):
    pass


class SingularZ(RobinError):
    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class InconsistentGradient(RobinError):
    pass


class NoPositiveWeight(RobinError, ValueError):
    """The boundary weight is nowhere positive."""


class NonNegativeQuotient(RobinError):
    def __init__(self, message, gamma=None):
        super().__init__(message)
        self.gamma = gamma


class MeshFailure(RobinError):
    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class FactorizationFailure(RobinError):
    pass


class NoConvergence(RobinError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations
