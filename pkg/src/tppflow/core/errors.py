from typing import Optional


class TppflowError(Exception):
    """Base class for every error raised by tppflow."""


class MalformedSequenceError(TppflowError, ValueError):
    """A sequence violates the strict time-ordering or location invariants."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class ParseError(TppflowError, ValueError):
    """An input row could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ShapeError(TppflowError, ValueError):
    pass


class DomainError(TppflowError, ValueError):
    """A value lies outside the domain of the function applied to it."""


class NonFiniteError(TppflowError, ArithmeticError):
    pass


class ConfigError(TppflowError, ValueError):
    """Invalid experiment or component configuration."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class VocabularyMismatchError(TppflowError, ValueError):
    pass


class CheckpointError(TppflowError, ValueError):
    pass


class UnstableProcessError(TppflowError, ValueError):
    pass
