"""Exception types shared across the package."""

from __future__ import annotations


class HardyLabError(Exception):
    """Base class for all package errors."""


class IntervalError(HardyLabError):
    """Empty or malformed interval."""


class WeightDomainError(HardyLabError):
    """Weight descriptor violates its domain contract (negative values, bad grid, ...)."""


class ExponentError(HardyLabError):
    """Exponent tuple outside the admissible range for the requested mode."""


class NotGeometricError(HardyLabError):
    """A lemma-pair weight sequence is not geometrically decreasing."""


class MonotonicityError(HardyLabError):
    """An input that must be monotone (sigma, h, grid points) is not."""


class TruncationDominatedError(HardyLabError):
    """A truncated infinite sum is dominated by its last term; deepen the sequence."""


class DiscretizationError(HardyLabError):
    """A discretizing sequence cannot be built for the given weight."""


class ConfigError(HardyLabError):
    """Campaign config rejected at parse time."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
