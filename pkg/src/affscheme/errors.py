"""Exception types and capacity limits shared by every module."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, replace


class AffSchemeError(Exception):
    """Base class for all package errors."""


class CapacityError(AffSchemeError):
    """A configured size guard was exceeded."""


class InvariantError(AffSchemeError):
    """A value violates a structural invariant (not an ideal, not a ring, ...)."""


class HomError(AffSchemeError):
    """A proposed map fails one of the ring homomorphism laws."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class VerificationError(AffSchemeError):
    """A check that is expected to pass did not; carries the witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Limits:
    max_order: int = 64
    max_ideals: int = 4096
    max_product: int = 10**6
    max_opens_exhaustive: int = 12
    max_search: int = 10**6
    max_iso_order: int = 64


_current = Limits()


def limits() -> Limits:
    return _current


def set_limits(**changes) -> Limits:
    global _current
    _current = replace(_current, **changes)
    return _current


@contextlib.contextmanager
def limits_override(**changes):
    global _current
    saved = _current
    _current = replace(_current, **changes)
    try:
        yield _current
    finally:
        _current = saved
