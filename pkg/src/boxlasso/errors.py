"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class BoxLassoError(Exception):
    """Base class for every error raised by :mod:`boxlasso`."""


class InvalidInputError(BoxLassoError, ValueError):
    """Malformed input: wrong shapes, non-finite entries, negative radii.

    ``field`` names the offending input (e.g. ``"tau"`` or ``"A"``) so that
    parsers can report it back to the user.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class InapplicableError(BoxLassoError):
    """A closed-form method's hypotheses do not hold for the given problem.

    ``details`` carries the diagnostic that failed (worst off-diagonal pair,
    worst coordinate margin, ...).
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class SizeLimitError(InapplicableError):
    """Exhaustive enumeration requested beyond the supported dimension."""


class SingularSystemError(BoxLassoError):
    """Linear system is singular, indefinite or not symmetric."""


class ConvergenceError(BoxLassoError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
