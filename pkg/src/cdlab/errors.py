"""Exception types shared across the library."""

from __future__ import annotations


class CdLabError(Exception):
    """Base class for all library errors."""


class ConvergenceError(CdLabError):
    """An iterative kernel ran out of its iteration budget.

    Carries the failing index (eigenvalue position, grid index, ...) when
    one is meaningful.
    """

    def __init__(self, message: str, *, index: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.index = index
        self.residual = residual


class RootFindingError(ConvergenceError):
    """Simultaneous root iteration failed; carries the best iterate seen."""

    def __init__(self, message: str, *, best: "object" = None, residual: float | None = None):
        super().__init__(message, residual=residual)
        self.best = best


class GridTooCoarseError(CdLabError):
    """Phase tracking saw an argument jump too large to disambiguate."""

    def __init__(self, message: str, *, index: int):
        super().__init__(message)
        self.index = index


class IntegrationError(CdLabError):
    """An integrand returned NaN/inf or a quadrature failed to settle."""

    def __init__(self, message: str, *, node: float | None = None):
        super().__init__(message)
        self.node = node


class SpecError(CdLabError):
    """A measure specification violates its invariants."""


class DegreeCapError(SpecError):
    """A finite-atom measure cannot support the requested polynomial degree."""


class InvariantViolation(CdLabError):
    """A mathematically guaranteed property failed numerically."""


class ConfigError(CdLabError):
    """Run configuration is malformed; names the offending key."""

    def __init__(self, message: str, *, key: str | None = None):
        super().__init__(message)
        self.key = key
