"""Exception types raised across the package."""


class Le2stError(Exception):
    """Base class for all package errors."""


class InvalidInputError(Le2stError, ValueError):
    """Malformed input: non-finite coordinates, missing labels, bad dimensions."""


class DegenerateVarianceError(Le2stError, ArithmeticError):
    """A null variance (or a variance-like radicand) is not strictly positive."""


class DegenerateTrainingError(Le2stError, ValueError):
    """Training data contains a single class."""


class PoolExhaustedError(Le2stError):
    """Not enough unlabeled points remain to form a query batch."""


class InfeasibleError(Le2stError, ValueError):
    """The target prior lies outside the range of the posteriors."""


class DegenerateInstanceError(Le2stError, ValueError):
    """All posteriors are equal, so the linear program has no spread."""
