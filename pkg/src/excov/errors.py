"""Error hierarchy and resource caps.

Every failure the library can produce falls into one of three buckets,
and the CLI maps each bucket to a fixed exit code: bad input (2),
a size cap exceeded (3), and an internal invariant violation (4).
Invariant violations are never downgraded or silently repaired.
"""

from __future__ import annotations

import os

DEFAULT_FIELD_CAP = 2 ** 24
DEFAULT_GROUP_CAP = 10 ** 6

_CAP_ENV = "EXCOV_CAP"


class ExcovError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(ExcovError):
    """Caller supplied an argument outside an operation's domain."""

    exit_code = 2


class CapExceededError(ExcovError):
    """An enumeration or closure would exceed a configured size cap."""

    exit_code = 3


class InternalInvariantError(ExcovError):
    """A computed value contradicts something the library guarantees."""

    exit_code = 4


def field_cap() -> int:
    """Current cap on enumerated field size, overridable via EXCOV_CAP."""
    raw = os.environ.get(_CAP_ENV)
    if raw is None:
        return DEFAULT_FIELD_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise ValidationError(f"{_CAP_ENV} must be at least 2, got {cap}")
    return cap


def check_field_cap(size: int, what: str = "field") -> None:
    cap = field_cap()
    if size > cap:
        raise CapExceededError(f"{what} of size {size} exceeds cap {cap}")
