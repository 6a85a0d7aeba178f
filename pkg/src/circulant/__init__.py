"""Solver library for symmetric circulant real linear systems."""

from .core import (
    DEFAULT_SINGULAR_TOLERANCE,
    CirculantSpec,
    DftPlan,
    DftStrategy,
    SingularityReport,
    Spectrum,
    as_real_vector,
    dft_forward,
    dft_inverse,
    is_singular,
    make_spec,
    make_spec_from_generator,
    spectrum,
)
from .errors import (
    AllocationLimit,
    CirculantError,
    DimensionMismatch,
    EmptyInput,
    LengthMismatch,
    NoConvergence,
    NonFiniteInput,
    NumericalHealthWarning,
    NumericallySingular,
    SingularSystem,
    SymmetryViolation,
)
from .oracle import (
    DENSE_CAP_DEFAULT,
    DenseMatrix,
    dense_eigenvalues,
    dense_solve,
    materialize,
    random_rhs,
    random_spec,
)
from .solver import (
    FFT_DISPATCH_MIN,
    RhsSpectrum,
    SolvePath,
    SolveReport,
    get_plan,
    matvec,
    rhs_spectrum,
    solve,
    solve_constant,
    solve_direct,
    solve_fft,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationLimit",
    "CirculantError",
    "CirculantSpec",
    "DEFAULT_SINGULAR_TOLERANCE",
    "DENSE_CAP_DEFAULT",
    "DenseMatrix",
    "DftPlan",
    "DftStrategy",
    "DimensionMismatch",
    "EmptyInput",
    "FFT_DISPATCH_MIN",
    "LengthMismatch",
    "NoConvergence",
    "NonFiniteInput",
    "NumericalHealthWarning",
    "NumericallySingular",
    "RhsSpectrum",
    "SingularSystem",
    "SingularityReport",
    "SolvePath",
    "SolveReport",
    "Spectrum",
    "SymmetryViolation",
    "as_real_vector",
    "dense_eigenvalues",
    "dense_solve",
    "dft_forward",
    "dft_inverse",
    "get_plan",
    "is_singular",
    "make_spec",
    "make_spec_from_generator",
    "materialize",
    "matvec",
    "random_rhs",
    "random_spec",
    "rhs_spectrum",
    "solve",
    "solve_constant",
    "solve_direct",
    "solve_fft",
    "spectrum",
]
