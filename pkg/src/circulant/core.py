"""Symmetric circulant matrices, their real spectrum, and DFT plans.

A symmetric circulant matrix is stored as its first row ``a_0 .. a_{n-1}``
with the mirror constraint ``a_{n-l} == a_l`` enforced exactly at
construction. Entry ``(k, j)`` of the full matrix is ``a_{(j-k) mod n}``;
the matrix itself is never materialized here.

Eigenvalues are real and come from the cosine sum

    psi_k = a_0 + 2 * sum_{m=1..floor((n-1)/2)} a_m cos(2 pi m k / n)
            + (-1)^k * a_{n/2}   (term present only for even n)

The DFT plan applies the unnormalized forward transform
``X_k = sum_j v_j e^{-2 pi i j k / n}`` and its ``1/n``-scaled inverse.
Power-of-two lengths use iterative radix-2 decimation in time; every other
length goes through Bluestein's chirp-z reduction to a power-of-two
convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    LengthMismatch,
    NonFiniteInput,
    SymmetryViolation,
)

TWO_PI = 2.0 * math.pi

#: Relative threshold below which an eigenvalue counts as zero.
DEFAULT_SINGULAR_TOLERANCE = 1e-10

# Working-set cap (in table entries) for the blocked spectrum evaluation.
_SPECTRUM_BLOCK_ENTRIES = 2_000_000


def as_real_vector(entries, n: int | None = None) -> np.ndarray:
    """Validate and copy a real vector into a 1-D float64 array.

    Raises EmptyInput for zero length, NonFiniteInput on NaN/inf, and
    DimensionMismatch when ``n`` is given and the length differs.
    """
    arr = np.array(entries, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyInput("vector must have at least one entry")
    if n is not None and arr.size != n:
        raise DimensionMismatch(f"expected length {n}, got {arr.size}")
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NonFiniteInput(f"non-finite entry at index {bad}")
    return arr


@dataclass(frozen=True, eq=False)
class CirculantSpec:
    """First-row representation of a symmetric circulant matrix."""

    n: int
    first_row: np.ndarray

    def __repr__(self) -> str:  # keep huge rows out of tracebacks
        head = np.array2string(self.first_row[:8], separator=", ")
        tail = ", ..." if self.n > 8 else ""
        return f"CirculantSpec(n={self.n}, first_row={head[:-1]}{tail}])"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Real eigenvalues ``psi_0 .. psi_{n-1}`` of a circulant spec."""

    values: np.ndarray
    singular_tolerance: float = DEFAULT_SINGULAR_TOLERANCE

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SingularityReport:
    """Outcome of the relative singularity test; truthy iff singular."""

    singular: bool
    offending: tuple[int, ...]
    min_abs: float
    max_abs: float

    def __bool__(self) -> bool:
        return self.singular


def make_spec(first_row) -> CirculantSpec:
    """Build a validated spec from a full first row.

    The mirror constraint ``first_row[n-l] == first_row[l]`` must hold
    exactly; callers with noisy data should symmetrize explicitly through
    :func:`make_spec_from_generator`.

    Raises EmptyInput, NonFiniteInput, or SymmetryViolation (reporting the
    first offending index pair).
    """
    arr = np.array(first_row, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise LengthMismatch(f"first row must be 1-D, got shape {arr.shape}")
    n = arr.size
    if n == 0:
        raise EmptyInput("first row must have at least one entry")
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NonFiniteInput(f"non-finite entry at index {bad}")
    if n > 1:
        # arr[1:][i] pairs with arr[1:][::-1][i] as (l, n-l) for l = i+1
        mismatch = np.flatnonzero(arr[1:] != arr[:0:-1])
        if mismatch.size:
            l = int(mismatch[0]) + 1
            diff = abs(float(arr[l]) - float(arr[n - l]))
            raise SymmetryViolation(l, n - l, diff)
    arr.setflags(write=False)
    return CirculantSpec(n=n, first_row=arr)


def make_spec_from_generator(a0: float, half, n: int) -> CirculantSpec:
    """Build a spec from the free coefficients ``a_0`` and ``a_1..a_{n//2}``.

    ``half`` must hold exactly ``n // 2`` values; for even ``n`` its last
    element is the self-mirrored ``a_{n/2}``.
    """
    if n < 1:
        raise EmptyInput("dimension must be at least 1")
    half_arr = np.array(half, dtype=np.float64, copy=True).reshape(-1)
    if half_arr.size != n // 2:
        raise LengthMismatch(
            f"generator needs {n // 2} off-diagonal values for n={n}, "
            f"got {half_arr.size}"
        )
    row = np.empty(n, dtype=np.float64)
    row[0] = a0
    row[1 : n // 2 + 1] = half_arr
    row[n // 2 + 1 :] = half_arr[: (n - 1) // 2][::-1]
    if not np.isfinite(row).all():
        raise NonFiniteInput("generator coefficients must be finite")
    row.setflags(write=False)
    return CirculantSpec(n=n, first_row=row)


def spectrum(
    spec: CirculantSpec, *, singular_tolerance: float = DEFAULT_SINGULAR_TOLERANCE
) -> Spectrum:
    """Eigenvalues of ``spec`` via the real cosine sum.

    The angle ``2 pi m k / n`` is reduced through ``(m * k) mod n`` before
    the table lookup, so large index products cost no precision. Work and
    memory stay ``O(n^2)`` and ``O(n * block)`` respectively.
    """
    n = spec.n
    a = spec.first_row
    half = (n - 1) // 2
    values = np.full(n, a[0])
    if half:
        coeffs = a[1 : half + 1]
        m_idx = np.arange(1, half + 1, dtype=np.int64)
        block = max(1, _SPECTRUM_BLOCK_ENTRIES // half)
        for start in range(0, n, block):
            k_idx = np.arange(start, min(start + block, n), dtype=np.int64)
            reduced = np.outer(m_idx, k_idx) % n
            cosines = np.cos((TWO_PI / n) * reduced)
            values[start : start + k_idx.size] += 2.0 * (coeffs @ cosines)
    if n % 2 == 0:
        signs = 1.0 - 2.0 * (np.arange(n) & 1)
        values += a[n // 2] * signs
    values.setflags(write=False)
    return Spectrum(values=values, singular_tolerance=singular_tolerance)


def is_singular(s: Spectrum) -> SingularityReport:
    """Relative test: singular iff some ``|psi_k| <= tol * max |psi|``."""
    abs_vals = np.abs(s.values)
    max_abs = float(abs_vals.max())
    min_abs = float(abs_vals.min())
    if max_abs == 0.0:
        offending = tuple(range(s.n))
    else:
        offending = tuple(
            int(k) for k in np.flatnonzero(abs_vals <= s.singular_tolerance * max_abs)
        )
    return SingularityReport(
        singular=bool(offending),
        offending=offending,
        min_abs=min_abs,
        max_abs=max_abs,
    )


class DftStrategy(Enum):
    RADIX2 = "radix2"
    ARBITRARY_LENGTH = "arbitrary-length"


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _bit_reversal(n: int) -> list[int]:
    bits = n.bit_length() - 1
    rev = [0] * n
    for i in range(1, n):
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) << (bits - 1))
    return rev


class DftPlan:
    """Precomputed transform of a fixed length, reusable and read-only.

    Public attributes mirror the plan contract: ``n``, the unit-magnitude
    ``twiddles`` ``e^{-2 pi i j / n}``, and the ``strategy`` actually used.
    The butterfly kernel runs on plain Python complex numbers; its cost
    tracks the ``n log n`` operation count instead of vector-dispatch
    overhead, which keeps measured scaling honest across sizes.
    """

    def __init__(self, n: int):
        if n < 1:
            raise EmptyInput("transform length must be at least 1")
        self.n = n
        self.twiddles = np.exp((-2j * math.pi / n) * np.arange(n))
        self.twiddles.setflags(write=False)
        if _is_power_of_two(n):
            self.strategy = DftStrategy.RADIX2
            self._init_radix2(n, self.twiddles)
            self._sub: DftPlan | None = None
        else:
            self.strategy = DftStrategy.ARBITRARY_LENGTH
            self._init_bluestein(n)

    def _init_radix2(self, n: int, twiddles: np.ndarray) -> None:
        self._bitrev = _bit_reversal(n)
        self._stage_twiddles: list[list[complex]] = []
        size = 2
        while size <= n:
            stride = n // size
            self._stage_twiddles.append(
                [complex(twiddles[j * stride]) for j in range(size // 2)]
            )
            size *= 2

    def _init_bluestein(self, n: int) -> None:
        # chirp c_j = e^{-i pi j^2 / n}; j^2 reduced mod 2n keeps args small
        chirp = []
        for j in range(n):
            r = (j * j) % (2 * n)
            ang = -math.pi * r / n
            chirp.append(complex(math.cos(ang), math.sin(ang)))
        self._chirp = chirp
        conv_len = 1 << (2 * n - 2).bit_length()  # next power of two >= 2n-1
        self._sub = DftPlan(conv_len)
        kernel = [0j] * conv_len
        for j in range(n):
            g = chirp[j].conjugate()
            kernel[j] = g
            if j:
                kernel[conv_len - j] = g
        self._kernel_fft = self._sub._forward_list(kernel)

    def _fft_pow2(self, values: list[complex]) -> list[complex]:
        n = self.n
        a = [values[i] for i in self._bitrev]
        for tw in self._stage_twiddles:
            half = len(tw)
            size = half * 2
            for j, w in enumerate(tw):
                for i0 in range(j, n, size):
                    i1 = i0 + half
                    u = a[i0]
                    v = a[i1] * w
                    a[i0] = u + v
                    a[i1] = u - v
        return a

    def _forward_list(self, values: list[complex]) -> list[complex]:
        if self.strategy is DftStrategy.RADIX2:
            return self._fft_pow2(values)
        sub = self._sub
        m = sub.n
        chirp = self._chirp
        padded = [values[j] * chirp[j] for j in range(self.n)]
        padded.extend([0j] * (m - self.n))
        transformed = sub._forward_list(padded)
        kernel_fft = self._kernel_fft
        product = [transformed[i] * kernel_fft[i] for i in range(m)]
        conv = sub._inverse_list(product)
        return [conv[k] * chirp[k] for k in range(self.n)]

    def _inverse_list(self, values: list[complex]) -> list[complex]:
        inv_n = 1.0 / self.n
        forward = self._forward_list([v.conjugate() for v in values])
        return [z.conjugate() * inv_n for z in forward]


def dft_forward(plan: DftPlan, v) -> np.ndarray:
    """Unnormalized forward transform ``X_k = sum_j v_j e^{-2 pi i j k / n}``."""
    data = _as_complex_list(plan, v)
    return np.asarray(plan._forward_list(data), dtype=np.complex128)


def dft_inverse(plan: DftPlan, v) -> np.ndarray:
    """Inverse of :func:`dft_forward`: ``(1/n) sum_k X_k e^{+2 pi i j k / n}``."""
    data = _as_complex_list(plan, v)
    return np.asarray(plan._inverse_list(data), dtype=np.complex128)


def _as_complex_list(plan: DftPlan, v) -> list[complex]:
    arr = np.asarray(v)
    if arr.ndim != 1 or arr.size != plan.n:
        raise LengthMismatch(
            f"plan is for length {plan.n}, input has shape {arr.shape}"
        )
    return np.ascontiguousarray(arr, dtype=np.complex128).tolist()
