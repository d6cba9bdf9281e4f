"""Exception and warning types shared across the package."""


class LocGameError(Exception):
    """Base class for all package errors."""


class InvalidConfig(LocGameError, ValueError):
    """Raised for malformed parameters, files or experiment configs."""


class EdgeListError(InvalidConfig):
    pass


class DisconnectedGraph(LocGameError):
    pass


class InvalidK(InvalidConfig):
    pass


class IllegalRobberMove(LocGameError):
    pass


class InvalidPair(InvalidConfig):
    pass


class BudgetExceeded(LocGameError):
    pass


class DegenerateRegime(InvalidConfig):
    pass


class CaseMismatch(InvalidConfig):
    pass


class EpsOutOfRange(InvalidConfig):
    pass


class TooManyDisconnectedResamples(LocGameError):
    pass


class RegimeWarning(UserWarning):
    """A bound formula was evaluated outside the range where it says anything."""
