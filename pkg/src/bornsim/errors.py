"""Exception types raised when a physical or structural invariant is violated."""

from __future__ import annotations


class BornsimError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidInputError(BornsimError):
    """Malformed or mutually inconsistent arguments (shape, dims, labels)."""


class NotHermitianError(BornsimError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class NotUnitaryError(BornsimError):
    """A matrix that must be unitary is not, beyond tolerance."""


class InvalidDensityError(BornsimError):
    """A density matrix violates Hermiticity, unit trace, or positivity."""


class InvalidProjectorFamilyError(BornsimError):
    """A projector family is not orthogonal, idempotent, or complete."""


class ZeroProbabilityBranchError(BornsimError):
    """A branch with (numerically) zero weight was selected."""


class NotDecoheredError(BornsimError):
    """A density matrix has off-block coherences where none are allowed."""
