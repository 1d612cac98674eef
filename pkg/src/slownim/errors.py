"""Exception types raised by the slownim package."""

from __future__ import annotations


class SlowNimError(Exception):
    """Base class for every error raised by this package."""


class InvalidPositionError(SlowNimError):
    """Position data is malformed: empty, negative, non-integer, or unsorted."""


class InvalidSpecError(SlowNimError):
    """Game parameters are out of range (need 1 <= k <= n, n >= 1)."""


class IllegalMoveError(SlowNimError):
    """The requested move reduces an empty pile or names bad indices."""


class NoMovesError(SlowNimError):
    """A move was requested from a terminal position."""


class UnsupportedSpecError(SlowNimError):
    """The operation is only defined for a restricted spec (e.g. k = n-1)."""


class OutOfBoxError(SlowNimError):
    """A position or rank lies outside the enumeration box."""


class CorruptTableError(SlowNimError):
    """A table file failed its magic, header, length, or checksum validation."""


class ResourceLimitError(SlowNimError):
    """The requested computation exceeds the configured size budget."""


class NotAnExceptionError(SlowNimError):
    """Diagnosis was requested for a position the M-rule handles optimally."""


class UnknownFamilyError(SlowNimError):
    """No catalog entry matches the requested family id."""
