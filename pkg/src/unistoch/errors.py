"""Exception types separating bad input from numerical breakdown."""

from __future__ import annotations


class ValidationError(ValueError):
    """Input violates a documented structural constraint.

    `violations` lists every constraint that failed, so callers can report
    all problems at once instead of the first one found.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations if violations is not None else [message]


class NumericalError(RuntimeError):
    """Internal numerical failure (e.g. SVD non-convergence)."""
