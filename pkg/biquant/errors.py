"""
Exception hierarchy shared by the library and the command-line tool.

Everything derives from ``BiquantError`` which is a ``ValueError`` so that
callers treating bad input generically keep working.
"""


class BiquantError(ValueError):
    """Base class for every error raised by biquant"""


class ConfigError(BiquantError):
    """An environment variable or option could not be interpreted"""


class ParseError(BiquantError):
    """
    Malformed algebra definition text

    Args:
        message: Human readable description
        line: 1-based line number of the offending token
        column: 1-based column of the offending token
        token: The offending token, if known
    """
    def __init__(self, message, line=None, column=None, token=None):
        self.line = line
        self.column = column
        self.token = token
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(f"{where}{message}")


class PreconditionError(BiquantError):
    """A mathematical precondition of an operation does not hold"""


class DimensionMismatchError(PreconditionError):
    pass


class NotNilpotentError(PreconditionError):
    pass


class CharacterError(PreconditionError):
    """
    A functional on a subalgebra does not vanish on its derived algebra

    Args:
        message: Description
        pair: The pair of basis names whose bracket is not killed
    """
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class DependentSubspaceError(PreconditionError):
    pass


class NonComplementError(PreconditionError):
    pass


class NonTransverseError(PreconditionError):
    """h + b is not the whole algebra; the caller should resample the form"""


class NotReducedError(PreconditionError):
    pass


class SeriesError(PreconditionError):
    """An exponential series would not terminate"""


class CertificateError(BiquantError):
    """A post-hoc certificate failed. This indicates a bug, not bad input."""
