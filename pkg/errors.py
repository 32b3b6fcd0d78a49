"""
errors.py - Exception hierarchy

Every failure the engine raises on purpose derives from SchurError, so the
CLI can map a whole family onto one exit code:

- InvalidSpecError   -> exit 2 (bad input)
- SizeLimitError     -> exit 3 (resource bound)
- everything else    -> exit 1 (semantic failure)
"""

from typing import Any, Optional


class SchurError(Exception):
    """Base class for all engine errors."""


class InvalidSpecError(SchurError, ValueError):
    """Malformed group spec, factor < 2, or malformed S-ring file."""


class SizeLimitError(SchurError):
    """A configured size bound was exceeded."""

    def __init__(self, what: str, size: int, bound: int):
        super().__init__(f"{what}: {size} exceeds bound {bound}")
        self.what = what
        self.size = size
        self.bound = bound


class NonUnitError(SchurError, ValueError):
    """Power map exponent shares a factor with the group exponent."""


class NotSimpleDivisorError(SchurError, ValueError):
    """q does not divide |H| exactly once."""


class NotASubgroupError(SchurError, ValueError):
    """Given set is not a subgroup, or not a union of basic sets."""


class NotOvergroupError(SchurError, ValueError):
    """Permutation group does not contain the right translations."""


class GroupMismatchError(SchurError, ValueError):
    """Operands live over different groups."""


class PreconditionViolation(SchurError):
    """An operation was called outside its stated hypothesis."""


class RefutationWitness(SchurError):
    """A structural statement failed; `witness` says where."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class VerdictMismatchError(SchurError):
    """Two CI oracles disagree on the same partition."""

    def __init__(self, message: str, verdicts: Optional[dict] = None):
        super().__init__(message)
        self.verdicts = verdicts or {}


__all__ = [
    'SchurError', 'InvalidSpecError', 'SizeLimitError', 'NonUnitError',
    'NotSimpleDivisorError', 'NotASubgroupError', 'NotOvergroupError',
    'GroupMismatchError', 'PreconditionViolation', 'RefutationWitness',
    'VerdictMismatchError',
]
