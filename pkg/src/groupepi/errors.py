class GroupEPIError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GroupEPIError, ValueError):
    """An argument lies outside the domain of the operation."""


class BoundaryError(DomainError):
    """Evaluation at a singular boundary point was refused."""


class GroupMismatchError(GroupEPIError, ValueError):
    pass


class UnsupportedGroupError(GroupEPIError, ValueError):
    """The closed form is only known for abelian groups of order 2^n."""


class CapacityError(GroupEPIError, ValueError):
    """Problem size exceeds a documented guard."""


class PreconditionError(GroupEPIError, ValueError):
    """A structural precondition (Gaussian noise, degradedness) does not hold for the input."""
