"""Exception types shared across the package.

Plain ``ValueError`` is used for invalid arguments and out-of-range inputs;
the classes below cover failures that callers (and the CLI) need to tell
apart.
"""

from __future__ import annotations


class ShockvolError(Exception):
    """Base class for package-specific failures."""


class DataError(ShockvolError):
    """Malformed input data. Carries the offending 1-based row when known."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row


class DegenerateDataError(ShockvolError):
    """Data admits no meaningful estimate (zero variance, zero moments)."""


class SingularPointError(ShockvolError):
    """Evaluation requested exactly at a volatility singularity."""


class NumericError(ShockvolError):
    """A numerical routine failed to reach its accuracy target."""


class FitFailure(ShockvolError):
    """No finite-loss parameter point was found across all starts."""
