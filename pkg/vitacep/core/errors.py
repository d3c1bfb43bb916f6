"""
VITACEP - Custom Exception Classes

Defines the exception hierarchy for the application.
All custom exceptions inherit from VitacepError.
"""

from typing import Iterable, Optional


class VitacepError(Exception):
    """Base exception for all VITACEP errors."""

    pass


class ConfigurationError(VitacepError, ValueError):
    """Raised when there are configuration issues."""

    pass


class UsageError(VitacepError):
    """Raised when command-line arguments are inconsistent."""

    pass


class DataError(VitacepError, ValueError):
    """Raised when input data violates the data model."""

    pass


class InvalidIntervalError(DataError):
    """Raised when an interval does not satisfy start < end."""

    pass


class UnitMismatchError(DataError):
    """Raised when samples or thresholds disagree on units."""

    pass


class UnsortedInputError(DataError):
    """Raised when a detector receives samples out of time order."""

    pass


class IngestError(DataError):
    """Raised when a source file cannot be converted to the unified schema."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class StoreError(VitacepError):
    """Raised when store operations fail."""

    pass


class UnknownStreamError(StoreError):
    """Raised when a stream id is not registered."""

    def __init__(self, stream_id: str):
        self.stream_id = stream_id
        super().__init__(f"Unknown stream: {stream_id}")


class KindMismatchError(StoreError):
    """Raised when records do not match the registered stream kind."""

    pass


class PatternError(VitacepError):
    """Base class for event-pattern language errors."""

    pass


class PatternSyntaxError(PatternError):
    """Raised when a definition file cannot be parsed."""

    def __init__(self, line: int, column: int, token: str, expected: Iterable[str]):
        self.line = line
        self.column = column
        self.token = token
        self.expected = frozenset(expected)
        expected_text = ", ".join(sorted(self.expected)) or "nothing"
        super().__init__(
            f"line {line}, column {column}: unexpected {token!r}, expected one of: {expected_text}"
        )


class DuplicateDefinitionError(PatternError):
    """Raised when a definition name is declared twice."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Duplicate definition: {name}")


class UnknownDetectorError(PatternError):
    """Raised when a detector call names an unregistered detector."""

    def __init__(self, name: str, available: Iterable[str] = ()):
        self.name = name
        super().__init__(f"Unknown detector: {name}. Available: {sorted(available)}")


class UnresolvedReferenceError(PatternError):
    """Raised when a stream or event reference cannot be resolved."""

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"Unresolved reference: {name}{suffix}")


class AmbiguousReferenceError(PatternError):
    """Raised when a bare identifier names both an event type and a stream."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Ambiguous reference: {name} is both an event type and a stream")
