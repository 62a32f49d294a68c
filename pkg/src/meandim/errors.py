"""Exception hierarchy shared by all subsystems.

InputError maps to CLI exit code 1, failed report assertions to exit code 2.
"""


class MeandimError(Exception):
    """Base class for all library errors."""


class InputError(MeandimError):
    """Malformed input: bad JSON, unknown identifiers, invalid arguments."""


class PreconditionError(InputError):
    """An operation's stated precondition does not hold for the given input."""


class BudgetError(MeandimError):
    """A search, enumeration, or resampling budget was exhausted."""
