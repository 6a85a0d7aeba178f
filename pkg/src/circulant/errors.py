"""Exception types shared across the package."""

from __future__ import annotations


class CirculantError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(CirculantError):
    """An input sequence that must be non-empty was empty."""


class NonFiniteInput(CirculantError):
    """An input contained NaN or infinity."""


class SymmetryViolation(CirculantError):
    """First row fails the mirror constraint row[n-l] == row[l].

    Carries the first offending index pair and the absolute difference.
    """

    def __init__(self, index: int, mirror: int, difference: float):
        self.index = index
        self.mirror = mirror
        self.difference = difference
        super().__init__(
            f"first_row[{index}] != first_row[{mirror}] "
            f"(absolute difference {difference:g})"
        )


class LengthMismatch(CirculantError):
    """A sequence had a length other than the one required."""


class DimensionMismatch(CirculantError):
    """A vector's length does not match the system dimension."""


class SingularSystem(CirculantError):
    """The system is singular under the relative eigenvalue criterion.

    ``indices`` lists the offending eigenvalue positions k and ``values``
    the corresponding eigenvalues.
    """

    def __init__(self, indices, values, tolerance: float):
        self.indices = tuple(int(k) for k in indices)
        self.values = tuple(float(v) for v in values)
        self.tolerance = tolerance
        detail = ", ".join(
            f"k={k} (psi={v:.6g})" for k, v in zip(self.indices, self.values)
        )
        super().__init__(
            f"singular system at relative tolerance {tolerance:g}: {detail}"
        )


class NumericallySingular(CirculantError):
    """Dense elimination hit a pivot too small to trust."""


class NoConvergence(CirculantError):
    """An iteration failed to converge within its sweep budget."""


class AllocationLimit(CirculantError):
    """A dense materialization would exceed the configured size cap."""


class NumericalHealthWarning(UserWarning):
    """Round-off exceeded an internal sanity threshold; result still returned."""
