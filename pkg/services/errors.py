"""
Exception hierarchy shared by the mining services
"""

from typing import Optional


class LampError(Exception):
    """Base class for every error raised by the services"""


class DomainError(LampError, ValueError):
    """A precondition of a statistical or mining operation was violated"""


class ParseError(LampError, ValueError):
    """Malformed transaction or label input"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DegenerateLabelsError(LampError):
    """The minority class is empty, so no pattern can ever be significant"""


class RefusalError(LampError):
    """An exhaustive computation was asked to run on an instance that is too large"""
