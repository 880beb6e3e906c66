"""Custom exceptions for absorbing-walk."""

from typing import Optional


class AbsorbingWalkError(Exception):
    """Base exception for all library errors."""
    pass


class InvalidArgumentError(AbsorbingWalkError, ValueError):
    """Raised when an argument is non-finite or outside its domain."""
    pass


class BranchDegeneracyError(AbsorbingWalkError):
    """Raised when z sits on a band edge, where the two q roots coincide."""
    pass


class PoleEvaluationError(AbsorbingWalkError):
    """Raised when the absorbing resolvent is evaluated at the boundary pole."""

    def __init__(self, message: str, z_p: Optional[complex] = None):
        super().__init__(message)
        self.z_p = z_p


class RegimeError(AbsorbingWalkError):
    """Raised when a weak-only or strong-only operation gets the other regime."""
    pass


class ConvergenceError(AbsorbingWalkError):
    """Raised when a series or quadrature exhausts its iteration budget."""

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved


class TruncationError(AbsorbingWalkError):
    """Raised when an oracle evolution reaches the artificial lattice edge."""

    def __init__(self, message: str, suggested_sites: Optional[int] = None):
        super().__init__(message)
        self.suggested_sites = suggested_sites


class ConsistencyError(AbsorbingWalkError):
    """Raised when an internal numerical invariant is violated."""
    pass
