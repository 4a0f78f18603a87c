"""Exception hierarchy shared by every solver and generator."""

from __future__ import annotations


class DsnError(Exception):
    """Base class for all library errors."""


class ParseError(DsnError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class NoFeasibleNetwork(DsnError):
    """The instance (or the requested solution class) admits no feasible network."""


class CapacityError(DsnError):
    """A configured cap on vertices, terminals, patterns or search nodes was exceeded."""


class ContractViolation(DsnError):
    """An input did not meet the documented shape precondition of an operation."""


class DivisionError(ContractViolation):
    """A computed r-division failed one of its guaranteed bounds."""
