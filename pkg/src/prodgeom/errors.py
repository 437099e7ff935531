"""Exception types raised by the toolkit."""


class GeometryError(Exception):
    """Base class for all errors raised by prodgeom."""


class SingularMetric(GeometryError):
    pass


class OffSurface(GeometryError):
    pass


class StencilOutOfDomain(GeometryError):
    pass


class NotApplicable(GeometryError):
    """The quantity is undefined at this point (for example T vanishes)."""


class NonConstantRank(GeometryError):
    pass


class WrongDimension(GeometryError):
    pass


class FrameNotParallel(GeometryError):
    pass


class SingularP(GeometryError):
    pass


class KindMismatch(GeometryError):
    pass


class ConstraintViolated(GeometryError):
    pass


class OutOfDomain(GeometryError):
    pass


class OutOfInterval(GeometryError):
    pass


class QZeroForZ(GeometryError):
    pass


class ZeroVector(GeometryError):
    pass


class BranchUnavailable(GeometryError):
    pass


class IntervalLeavesDomain(GeometryError):
    pass


class UnsupportedDimension(GeometryError):
    pass


class ConfigError(GeometryError):
    pass
