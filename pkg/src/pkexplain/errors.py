"""Exception taxonomy shared by the library, CLI and service.

Two failure classes matter operationally: bad input (CLI exit 2) and
numerical failure on valid input (CLI exit 3). Every library error derives
from one of them so front ends can map without enumerating leaf types.
"""


class PkexError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(PkexError):
    """Invalid argument, spec, file or request payload."""

    exit_code = 2


class InvalidSpecError(InputError):
    pass


class InvalidSubsetError(InputError):
    pass


class InsufficientDataError(InputError):
    pass


class ParseError(InputError):
    pass


class SchemaError(InputError):
    pass


class ResourceLimitError(InputError):
    pass


class NumericalError(PkexError):
    """Computation failed on structurally valid input."""

    exit_code = 3


class ConditioningError(NumericalError):
    pass


class RankDeficiencyError(NumericalError):
    pass
