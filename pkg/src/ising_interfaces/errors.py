"""Exception hierarchy shared by all modules."""


class IsingInterfaceError(Exception):
    """Base class for library errors."""


class PreconditionError(IsingInterfaceError, ValueError):
    """An operation was called on inputs outside its domain."""


class TruncationError(IsingInterfaceError):
    """The interface reached the top or bottom of the finite box."""


class InvalidInterfaceError(IsingInterfaceError, ValueError):
    """A face set is not the interface of any spin configuration."""


class AdmissibilityError(PreconditionError):
    """Standard walls with intersecting projections were combined."""


class GuaranteeViolation(IsingInterfaceError, AssertionError):
    """A postcondition that the construction promises did not hold."""
