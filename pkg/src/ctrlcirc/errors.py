"""Exception types shared across the package."""

from __future__ import annotations

from typing import Sequence


class CircuitError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(CircuitError):
    """Raw data is malformed: dangling references, bad shapes, unknown keys.

    Distinct from :class:`ValidationError`, which reports well-formed data
    that violates a model constraint.
    """


class ValidationError(CircuitError):
    """A well-formed object violates one or more model constraints.

    ``violations`` lists every violated clause by name, so callers can report
    all problems at once instead of the first one found.
    """

    def __init__(self, violations: Sequence[str], subject: str = "circuit"):
        self.violations = list(violations)
        self.subject = subject
        super().__init__(f"invalid {subject}: " + ", ".join(self.violations))


class CompositionError(CircuitError):
    """A composition operator was applied to incompatible operands."""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)
