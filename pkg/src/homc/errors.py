"""Exception types shared across the package."""


class HomcError(ValueError):
    """Base class for all input errors raised by this package."""


class InvalidIndexError(HomcError):
    pass


class InvalidArgumentError(HomcError):
    pass


class ShapeError(HomcError):
    pass


class InvalidParameterError(HomcError):
    pass


class WrongOrderError(HomcError):
    """Operation only defined for a specific chain order (usually m = 2)."""


class InvalidSpecError(HomcError):
    pass


class InvalidPermutationError(HomcError):
    pass


class CapacityError(HomcError):
    """Input exceeds a documented size bound of an exhaustive routine."""
