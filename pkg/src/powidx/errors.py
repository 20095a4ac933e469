"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class PowidxError(Exception):
    """Base class for all errors raised by powidx."""

    exit_code = 1


class InputError(PowidxError, ValueError):
    """Malformed arguments: wrong widths, out-of-range voters, shape mismatches."""

    exit_code = 2


class ParseError(InputError):
    """A game or density file could not be parsed."""

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}" if where else message)


class DomainError(PowidxError, ValueError):
    """The object is well formed but the operation is undefined on it."""

    exit_code = 4


class PreconditionError(DomainError):
    """A documented precondition of the operation does not hold."""

    exit_code = 4


class CapacityError(PowidxError):
    """An exhaustive computation would exceed its hard size cap."""

    exit_code = 3

    def __init__(self, message, cap=None):
        self.cap = cap
        super().__init__(message)


class ModeError(PowidxError, ValueError):
    """The requested numerics mode cannot handle the given game."""

    exit_code = 4
