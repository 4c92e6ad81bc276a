"""Exception hierarchy and non-fatal diagnostics."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from qcpg.graph import SourceLocation

logger = logging.getLogger(__name__)


class QcpgError(Exception):
    """Base class for all errors raised by this package."""


class UnknownNode(QcpgError, KeyError):
    pass


class DuplicateEdge(QcpgError, ValueError):
    pass


class FrozenGraphError(QcpgError, RuntimeError):
    pass


class SourceError(QcpgError):
    """An error tied to a position in an input file."""

    def __init__(self, location: Optional["SourceLocation"], message: str):
        self.location = location
        self.message = message
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.location is None:
            return self.message
        return f"{self.location}: {self.message}"


class LexError(SourceError):
    pass


class ParseError(SourceError):
    def __init__(self, location, expected: str, found: str):
        self.expected = expected
        self.found = found
        super().__init__(location, f"expected {expected}, found {found}")


class UnsupportedConstruct(SourceError):
    pass


class NonConstantSize(SourceError):
    pass


class BadOperand(SourceError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    """A warning that does not stop the analysis."""

    code: str
    message: str
    location: Optional["SourceLocation"] = None

    def __str__(self) -> str:
        where = f"{self.location}: " if self.location is not None else ""
        return f"{where}warning[{self.code}]: {self.message}"


class Diagnostics(list):
    """Collects warnings emitted by frontends and passes."""

    def warn(self, code: str, message: str, location=None) -> Diagnostic:
        diag = Diagnostic(code, message, location)
        logger.info("%s", diag)
        self.append(diag)
        return diag

    def codes(self) -> list[str]:
        return [d.code for d in self]
