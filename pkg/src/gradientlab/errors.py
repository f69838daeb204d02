"""Shared error and outcome types."""

from __future__ import annotations

from dataclasses import dataclass


class GradientLabError(Exception):
    """Base class for all package errors."""


class ParseError(GradientLabError):
    """Malformed presentation or spec file. Carries 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DomainError(GradientLabError):
    """Operands violate a precondition (mixed alphabets, bad indices, ...)."""


class CapExceededError(GradientLabError):
    """A configured desk-scale cap would be exceeded."""


class EmbeddingViolationError(GradientLabError):
    """Supplied subgroup presentation is inconsistent with the ambient action."""


@dataclass(frozen=True)
class Indeterminate:
    """Outcome of an enumeration that exhausted its limits before closing.

    This is a result value, not an exception: the index may be infinite or
    the limits too small, and batch drivers must keep going.
    """

    reason: str
    cosets_used: int = 0
    steps_used: int = 0

    def __str__(self) -> str:
        return f"indeterminate: {self.reason}"
