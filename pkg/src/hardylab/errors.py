"""Exception hierarchy shared by all hardylab modules."""


class HardyLabError(Exception):
    """Base class for every error raised by hardylab."""


class DomainError(HardyLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(DomainError):
    """A structural hypothesis on the inputs (monotonicity, sign, ...) fails."""


class ComputationError(HardyLabError, ArithmeticError):
    """Non-finite data was supplied or produced."""
