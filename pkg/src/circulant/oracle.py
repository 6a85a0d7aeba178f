"""Dense ground-truth path and random test-system generators.

Nothing here touches the solver module: the dense matrix is built straight
from the definition, solved by Gaussian elimination with partial pivoting,
and its eigenvalues come from cyclic Jacobi rotations. A bug shared with
the fast paths cannot validate itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CirculantSpec, as_real_vector, make_spec_from_generator
from .errors import AllocationLimit, NoConvergence, NumericallySingular

#: Largest n the oracle will materialize by default (~512 MB at 64-bit).
DENSE_CAP_DEFAULT = 8192

_PIVOT_FLOOR_REL = 1e-13
_OFFDIAG_TARGET_REL = 1e-11
_JACOBI_MAX_SWEEPS = 50


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    n: int
    entries: np.ndarray


def materialize(spec: CirculantSpec, *, cap: int = DENSE_CAP_DEFAULT) -> DenseMatrix:
    """Full matrix with entry (k, j) = first_row[(j - k) mod n].

    Each row is the previous one rotated right by one place; symmetry of
    the result is inherited from the first-row mirror constraint.
    """
    n = spec.n
    if n > cap:
        raise AllocationLimit(f"n={n} exceeds the dense cap of {cap}")
    entries = np.empty((n, n), dtype=np.float64)
    for k in range(n):
        entries[k] = np.roll(spec.first_row, k)
    entries.setflags(write=False)
    return DenseMatrix(n=n, entries=entries)


def dense_solve(m: DenseMatrix, b) -> np.ndarray:
    """Gaussian elimination with partial pivoting; the verification oracle."""
    n = m.n
    a = m.entries.astype(np.float64, copy=True)
    x = as_real_vector(b, n)
    norm = float(np.abs(a).sum(axis=1).max())
    pivot_floor = _PIVOT_FLOOR_REL * norm
    for col in range(n):
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if not abs(a[p, col]) > pivot_floor:
            raise NumericallySingular(
                f"pivot {a[p, col]:.3e} at column {col} below "
                f"{pivot_floor:.3e} (= {_PIVOT_FLOOR_REL:g} * inf-norm)"
            )
        if p != col:
            a[[col, p]] = a[[p, col]]
            x[[col, p]] = x[[p, col]]
        mult = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col + 1 :] -= np.outer(mult, a[col, col + 1 :])
        x[col + 1 :] -= mult * x[col]
    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def _rotation_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Round-robin schedule: each round holds disjoint index pairs, and a
    full pass covers every (p, q) pair exactly once."""
    m = n if n % 2 == 0 else n + 1
    order = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = order[i], order[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        if ps:
            rounds.append((np.asarray(ps), np.asarray(qs)))
        order = [order[0], order[-1]] + order[1:-1]
    return rounds


def dense_eigenvalues(m: DenseMatrix, *, max_sweeps: int = _JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a symmetric dense matrix by cyclic Jacobi rotations.

    Rotations within one round act on disjoint planes, so they commute and
    are applied as a batch. Returns eigenvalues sorted ascending once the
    off-diagonal Frobenius norm drops below 1e-11 times the inf-norm.
    """
    n = m.n
    a = m.entries.astype(np.float64, copy=True)
    if not np.array_equal(a, a.T):
        raise ValueError("dense eigenvalue oracle requires a symmetric matrix")
    if n == 1:
        return a.diagonal().copy()
    norm = float(np.abs(a).sum(axis=1).max())
    if norm == 0.0:
        return np.zeros(n)
    target = _OFFDIAG_TARGET_REL * norm
    skip = target / (n * n)
    rounds = _rotation_rounds(n)
    for _ in range(max_sweeps):
        off_diag = a.copy()
        np.fill_diagonal(off_diag, 0.0)
        if float(np.sqrt((off_diag * off_diag).sum())) <= target:
            return np.sort(a.diagonal())
        for all_p, all_q in rounds:
            apq = a[all_p, all_q]
            active = np.abs(apq) > skip
            if not active.any():
                continue
            p, q, apq = all_p[active], all_q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t = np.where(theta == 0.0, 1.0, t)  # equal diagonals: full 45 degrees
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rows_p, rows_q = a[p, :], a[q, :]
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            cols_p, cols_q = a[:, p], a[:, q]
            a[:, p] = cols_p * c - cols_q * s
            a[:, q] = cols_p * s + cols_q * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")


def random_spec(n: int, seed: int) -> CirculantSpec:
    """Deterministic strictly diagonally dominant spec for (n, seed).

    Off-diagonal generators are uniform on [-1, 1]; the diagonal is set to
    one plus the absolute sum of the rest of the row, which pins every
    eigenvalue at or above one.
    """
    rng = np.random.default_rng(seed)
    half = rng.uniform(-1.0, 1.0, n // 2)
    mirrored = make_spec_from_generator(0.0, half, n)
    a0 = 1.0 + float(np.abs(mirrored.first_row[1:]).sum())
    return make_spec_from_generator(a0, half, n)


def random_rhs(n: int, seed: int) -> np.ndarray:
    """Deterministic uniform [-1, 1] right-hand side, stream-separated from
    random_spec so the same seed may be reused for both."""
    rng = np.random.default_rng([seed, 1])
    return rng.uniform(-1.0, 1.0, n)
