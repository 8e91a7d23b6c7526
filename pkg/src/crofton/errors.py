"""Exception types shared across the package."""


class CroftonError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(CroftonError, ValueError):
    """An argument violates a documented precondition (non-unit direction,
    non-positive radius, dependent direction set, ...)."""


class ScheduleTooFineError(InvalidInputError):
    """A radius schedule reaches below the raster spacing in a bulk mode
    that requires radii >= spacing."""


class UnboundedDomainError(CroftonError):
    """The set/domain pair has an unbounded projection and no explicit
    sampling window was supplied."""


class GeneralPositionError(CroftonError):
    """Polygonal boundary extraction received operands it cannot regularize."""


class SceneFormatError(CroftonError, ValueError):
    """A scene or raster file does not conform to the documented schema."""
