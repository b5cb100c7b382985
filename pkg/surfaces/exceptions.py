# surfaces/exceptions.py
from __future__ import annotations

from typing import Optional


class GeometryError(ValueError):
    """Base class for every error raised by the geometry modules."""


# ---------- jets ----------
class DivisionByZeroValue(GeometryError):
    pass


class DomainError(GeometryError):
    pass


# ---------- surface files ----------
class ParseError(GeometryError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class UnknownIdentifier(ParseError):
    pass


class DimensionError(GeometryError):
    pass


# ---------- geometry ----------
class SingularPointError(GeometryError):
    pass


class TorsionUndefined(GeometryError):
    pass


# ---------- fields / oracle ----------
class SeedError(GeometryError):
    pass


class ContinuationFailure(GeometryError):
    pass
