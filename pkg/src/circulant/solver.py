"""Solution paths for symmetric circulant systems ``A x = b``.

Three routes to the same answer:

* ``solve_direct`` evaluates the closed-form real cosine sum, O(n^2),
  no complex arithmetic.
* ``solve_fft`` diagonalizes through the DFT plan, O(n log n).
* ``solve_constant`` handles an all-equal right-hand side in O(n).

``solve`` dispatches between them and always reports the residual
``max |A x - b|`` so every call doubles as a self-check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    DEFAULT_SINGULAR_TOLERANCE,
    TWO_PI,
    CirculantSpec,
    DftPlan,
    Spectrum,
    as_real_vector,
    dft_forward,
    dft_inverse,
    is_singular,
    spectrum,
)
from .errors import NonFiniteInput, NumericalHealthWarning, SingularSystem

#: Systems at least this large take the FFT route when dispatch is automatic.
FFT_DISPATCH_MIN = 64

# Working-set cap (matrix entries) for blocked O(n^2) kernels. Small enough
# that a block's trig rows stay cache-resident, so per-entry cost does not
# drift with n and measured runtime tracks the operation count.
_BLOCK_ENTRIES = 131_072

# Imaginary residue thresholds, relative to n * max magnitude. Exceeding
# them signals unhealthy round-off, not a wrong algorithm, so they warn.
_SPECTRUM_IMAG_TOL = 1e-12
_SOLUTION_IMAG_TOL = 1e-11


class SolvePath(Enum):
    DIRECT = "direct"
    FFT = "fft"
    CONSTANT_RHS = "constant-rhs"


@dataclass(frozen=True, eq=False)
class RhsSpectrum:
    """Transform coefficients ``T_k = (1/n) sum_j b_j e^{+2 pi i k j / n}``."""

    coefficients: np.ndarray

    @property
    def n(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True, eq=False)
class SolveReport:
    solution: np.ndarray
    path: SolvePath
    residual_inf_norm: float
    spectrum_min_abs: float


# Plan cache: concurrent lookups are fine, setdefault keeps one winner,
# and a duplicated construction is merely wasted work.
_PLANS: dict[int, DftPlan] = {}


def get_plan(n: int) -> DftPlan:
    plan = _PLANS.get(n)
    if plan is None:
        plan = _PLANS.setdefault(n, DftPlan(n))
    return plan


def rhs_spectrum(plan: DftPlan, b) -> RhsSpectrum:
    """Right-hand-side transform used by the FFT path."""
    vec = as_real_vector(b, plan.n)
    coefficients = dft_inverse(plan, vec)
    coefficients.setflags(write=False)
    return RhsSpectrum(coefficients=coefficients)


def _raise_if_singular(s: Spectrum) -> None:
    report = is_singular(s)
    if report:
        raise SingularSystem(
            report.offending,
            [float(s.values[k]) for k in report.offending],
            s.singular_tolerance,
        )


def solve_direct(
    spec: CirculantSpec,
    b,
    *,
    eigenvalues: Spectrum | None = None,
    singular_tolerance: float = DEFAULT_SINGULAR_TOLERANCE,
) -> np.ndarray:
    """Closed-form O(n^2) solve in real arithmetic.

    The solution entry is

        x_l = (1/n) psi_0^{-1} sum_j b_j
              + (2/n) sum_{k=1}^{floor((n-1)/2)} psi_k^{-1}
                      sum_j b_j cos(2 pi k (j - l) / n)
              + [n even] ((-1)^l / n) psi_{n/2}^{-1} sum_j (-1)^j b_j

    evaluated with the inner cosine split over (j, l) so both sums become
    plain matrix-vector products against blocks of reduced-angle cosines.

    ``eigenvalues`` may carry a precomputed spectrum (it is trusted as-is,
    tolerance included); otherwise the eigenvalues are evaluated from the
    same reduced-angle blocks the solve streams over.
    """
    x, _ = _direct_solve(
        spec, as_real_vector(b, spec.n), singular_tolerance, eigenvalues
    )
    return x


def _direct_solve(
    spec: CirculantSpec,
    b: np.ndarray,
    tolerance: float,
    eigenvalues: Spectrum | None = None,
) -> tuple[np.ndarray, Spectrum]:
    n = spec.n
    a = spec.first_row
    half = (n - 1) // 2
    psi_known = eigenvalues is not None
    if psi_known:
        _raise_if_singular(eigenvalues)
        psi = eigenvalues.values
        psi_0 = psi[0]
        psi_half = psi[1 : half + 1]
        psi_n2 = psi[n // 2] if n % 2 == 0 else np.float64(0.0)
    else:
        # psi_0 and psi_{n/2} have exact O(n) forms: the row sum and the
        # alternating row sum.
        psi_0 = a.sum()
        psi_n2 = np.float64(0.0)
        psi_half = np.empty(half)
        if n % 2 == 0:
            alt = 1.0 - 2.0 * (np.arange(n) & 1)
            psi_n2 = alt @ a

    # Divisions stay in numpy scalar space: a zero eigenvalue yields inf in
    # a buffer that the singularity check below discards, not an exception.
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = np.full(n, b.sum() / (n * psi_0))
        if half:
            grid = np.arange(n, dtype=np.int64)
            coeffs = a[1 : half + 1]
            block = max(1, min(half, _BLOCK_ENTRIES // n))
            index_buf = np.empty((block, n), dtype=np.int64)
            angle_buf = np.empty((block, n))
            # cosine rows on top of sine rows, so P and Q come from one
            # stacked product
            trig_buf = np.empty((2 * block, n))
            for start in range(0, half, block):
                k_block = np.arange(start + 1, min(start + block, half) + 1)
                rows = k_block.size
                idx = index_buf[:rows]
                np.multiply.outer(k_block, grid, out=idx)
                idx %= n
                angles = angle_buf[:rows]
                np.multiply(idx, TWO_PI / n, out=angles)
                cos_rows = trig_buf[:rows]
                sin_rows = trig_buf[block : block + rows]
                np.cos(angles, out=cos_rows)
                np.sin(angles, out=sin_rows)
                if psi_known:
                    psi_block = psi_half[start : start + rows]
                else:
                    # the same reduced angles evaluate the eigenvalues: the
                    # first columns of this block hold cos(2 pi k m / n)
                    psi_block = a[0] + 2.0 * (cos_rows[:, 1 : half + 1] @ coeffs)
                    if n % 2 == 0:
                        psi_block += a[n // 2] * (1.0 - 2.0 * (k_block & 1))
                    psi_half[start : start + rows] = psi_block
                if rows == block:
                    stacked = trig_buf
                else:  # tail block: pack the shorter halves contiguously
                    stacked = np.concatenate((cos_rows, sin_rows))
                pq = stacked @ b
                w = np.concatenate(((2.0 / n) / psi_block,) * 2)
                x += stacked.T @ (w * pq)
        if n % 2 == 0:
            signs = 1.0 - 2.0 * (np.arange(n) & 1)
            x += signs * ((signs @ b) / (n * psi_n2))

    if psi_known:
        return x, eigenvalues
    values = np.empty(n)
    values[0] = psi_0
    if half:
        values[1 : half + 1] = psi_half
        values[n - half :] = psi_half[::-1]  # psi_{n-k} = psi_k
    if n % 2 == 0:
        values[n // 2] = psi_n2
    values.setflags(write=False)
    s = Spectrum(values=values, singular_tolerance=tolerance)
    _raise_if_singular(s)
    return x, s


def solve_fft(
    spec: CirculantSpec,
    b,
    *,
    singular_tolerance: float = DEFAULT_SINGULAR_TOLERANCE,
) -> np.ndarray:
    """Diagonalization solve: x = F (F* b / n) / psi, O(n log n)."""
    x, _ = _fft_solve(spec, as_real_vector(b, spec.n), singular_tolerance)
    return x


def _fft_spectrum(spec: CirculantSpec, plan: DftPlan, tolerance: float) -> Spectrum:
    """Spectrum as the forward transform of the first row; imag part checked."""
    row_hat = dft_forward(plan, spec.first_row)
    max_a = float(np.abs(spec.first_row).max())
    residue = float(np.abs(row_hat.imag).max())
    if residue > _SPECTRUM_IMAG_TOL * spec.n * max_a:
        warnings.warn(
            f"spectrum imaginary residue {residue:.3e} above threshold",
            NumericalHealthWarning,
            stacklevel=3,
        )
    values = np.ascontiguousarray(row_hat.real)
    values.setflags(write=False)
    return Spectrum(values=values, singular_tolerance=tolerance)


def _fft_solve(
    spec: CirculantSpec, b: np.ndarray, tolerance: float
) -> tuple[np.ndarray, Spectrum]:
    plan = get_plan(spec.n)
    s = _fft_spectrum(spec, plan, tolerance)
    _raise_if_singular(s)
    t = dft_inverse(plan, b)
    ratio = t / s.values
    x_complex = dft_forward(plan, ratio)
    residue = float(np.abs(x_complex.imag).max())
    ratio_max = float(np.abs(ratio).max())
    if residue > _SOLUTION_IMAG_TOL * spec.n * ratio_max:
        warnings.warn(
            f"solution imaginary residue {residue:.3e} above threshold",
            NumericalHealthWarning,
            stacklevel=3,
        )
    return np.ascontiguousarray(x_complex.real), s


def solve_constant(
    spec: CirculantSpec,
    beta: float,
    *,
    singular_tolerance: float = DEFAULT_SINGULAR_TOLERANCE,
) -> np.ndarray:
    """Constant right-hand side: every solution entry is beta / sum(a).

    The row sum is psi_0; it is tested against ``sum |a_j|``, an O(n)
    upper bound for ``max |psi_k|``, so the check stays linear-time.
    """
    if not math.isfinite(beta):
        raise NonFiniteInput("constant right-hand side must be finite")
    row_sum = float(spec.first_row.sum())
    scale = float(np.abs(spec.first_row).sum())
    if scale == 0.0 or abs(row_sum) <= singular_tolerance * scale:
        raise SingularSystem([0], [row_sum], singular_tolerance)
    return np.full(spec.n, beta / row_sum)


def matvec(spec: CirculantSpec, x) -> np.ndarray:
    """Product ``A x`` with ``A[k, j] = first_row[(j - k) mod n]``, O(n^2)."""
    vec = as_real_vector(x, spec.n)
    n = spec.n
    grid = np.arange(n, dtype=np.int64)
    out = np.empty(n)
    block = max(1, _BLOCK_ENTRIES // n)
    for start in range(0, n, block):
        rows = grid[start : start + block]
        out[start : start + rows.size] = (
            spec.first_row[(grid[None, :] - rows[:, None]) % n] @ vec
        )
    return out


def _matvec_fft(plan: DftPlan, psi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Same product through the diagonalization, O(n log n)."""
    return dft_inverse(plan, psi * dft_forward(plan, x)).real


def _residual_inf(
    spec: CirculantSpec, x: np.ndarray, b: np.ndarray, psi: np.ndarray | None
) -> float:
    if spec.n >= FFT_DISPATCH_MIN and psi is not None:
        ax = _matvec_fft(get_plan(spec.n), psi, x)
    else:
        ax = matvec(spec, x)
    return float(np.abs(ax - b).max())


def solve(
    spec: CirculantSpec,
    b,
    path: SolvePath | None = None,
    *,
    singular_tolerance: float = DEFAULT_SINGULAR_TOLERANCE,
) -> SolveReport:
    """Dispatching front door; always residual-checked.

    Automatic dispatch: a bitwise-constant ``b`` takes the constant path,
    anything else goes FFT for ``n >= 64`` and direct below that. A near
    constant ``b`` is deliberately not special-cased.
    """
    vec = as_real_vector(b, spec.n)
    constant = bool(np.all(vec == vec[0]))
    if path is None:
        if constant:
            path = SolvePath.CONSTANT_RHS
        elif spec.n >= FFT_DISPATCH_MIN:
            path = SolvePath.FFT
        else:
            path = SolvePath.DIRECT

    if path is SolvePath.CONSTANT_RHS:
        if not constant:
            raise ValueError(
                "constant-rhs path requires a bitwise-constant right-hand side"
            )
        x = solve_constant(spec, float(vec[0]), singular_tolerance=singular_tolerance)
        # The full spectrum is reported for diagnostics only; a zero psi_k
        # at k != 0 does not invalidate the constant-path solution.
        if spec.n >= FFT_DISPATCH_MIN:
            s = _fft_spectrum(spec, get_plan(spec.n), singular_tolerance)
        else:
            s = spectrum(spec, singular_tolerance=singular_tolerance)
        residual = _residual_inf(spec, x, vec, s.values)
        min_abs = float(np.abs(s.values).min())
    elif path is SolvePath.FFT:
        x, s = _fft_solve(spec, vec, singular_tolerance)
        residual = _residual_inf(spec, x, vec, s.values)
        min_abs = float(np.abs(s.values).min())
    elif path is SolvePath.DIRECT:
        x, s = _direct_solve(spec, vec, singular_tolerance)
        residual = _residual_inf(spec, x, vec, s.values)
        min_abs = float(np.abs(s.values).min())
    else:
        raise ValueError(f"unknown path {path!r}")

    x.setflags(write=False)
    return SolveReport(
        solution=x,
        path=path,
        residual_inf_norm=residual,
        spectrum_min_abs=min_abs,
    )
