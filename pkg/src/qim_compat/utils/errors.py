"""
Exception types raised by the QIM-compatibility toolkit.

All library errors derive from QIMError; validation and format errors are
also ValueErrors so callers that only know the builtin types can catch them.
"""


class QIMError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(QIMError, ValueError):
    """Numeric or structural validation failure (CLI exit 65)."""


class ZeroProbabilityError(ValidationError):
    """Conditioning on an event of probability zero."""


class FormatError(QIMError, ValueError):
    """Malformed JSON input or schema violation (CLI exit 64)."""

    def __init__(self, message: str, line: int = None, column: int = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ScoringError(QIMError, RuntimeError):
    """Internal sanity assertion of a scoring routine failed."""
