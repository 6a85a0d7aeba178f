"""Command-line front end: solve, spectrum, gen, verify, bench.

Problem files are plain key/value text

    n: 4
    first_row: 4.0 1.0 0.0 1.0
    rhs: 6.0 6.0 6.0 6.0        (or: rhs: constant 6.0)

with ``#`` comment lines ignored, or flat CSV (first line the first row,
second line the right-hand side). Floats are written with shortest
round-trip formatting, so serialize(parse(f)) is canonical and stable.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 singular system. Diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .core import (
    DEFAULT_SINGULAR_TOLERANCE,
    Spectrum,
    is_singular,
    make_spec,
    spectrum,
)
from .errors import CirculantError, SingularSystem
from .solver import SolvePath, matvec, solve, solve_direct, solve_fft

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_SINGULAR = 3

_PATH_FLAGS = {
    "auto": None,
    "direct": SolvePath.DIRECT,
    "fft": SolvePath.FFT,
    "constant": SolvePath.CONSTANT_RHS,
}

# Verification tolerances, matching the solver module contracts.
_VERIFY_DIRECT_VS_DENSE = 1e-9
_VERIFY_FFT_VS_DIRECT = 1e-10
_VERIFY_EIGENVALUES = 1e-9
_VERIFY_RESIDUAL = 1e-8


class ProblemFormatError(ValueError):
    """Problem text failed to parse or validate."""


@dataclass(frozen=True)
class ProblemFile:
    n: int
    first_row: np.ndarray
    rhs: np.ndarray | None
    constant: float | None

    def rhs_vector(self) -> np.ndarray:
        if self.rhs is not None:
            return self.rhs
        return np.full(self.n, self.constant)


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_floats(tokens, field: str) -> list[float]:
    out = []
    for i, tok in enumerate(tokens):
        try:
            out.append(float(tok))
        except ValueError:
            raise ProblemFormatError(
                f"field '{field}': entry {i} ({tok!r}) is not a number"
            ) from None
    return out


def parse_problem(text: str) -> ProblemFile:
    """Parse a structured-text or CSV problem document."""
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ProblemFormatError("empty problem document")
    if ":" in lines[0]:
        return _parse_keyed(lines)
    return _parse_csv(lines)


def _parse_keyed(lines) -> ProblemFile:
    fields: dict[str, str] = {}
    for ln in lines:
        key, _, value = ln.partition(":")
        key = key.strip()
        if key not in ("n", "first_row", "rhs"):
            raise ProblemFormatError(f"unknown field '{key}'")
        if key in fields:
            raise ProblemFormatError(f"duplicate field '{key}'")
        fields[key] = value.strip()
    for required in ("n", "first_row", "rhs"):
        if required not in fields:
            raise ProblemFormatError(f"missing field '{required}'")
    try:
        n = int(fields["n"])
    except ValueError:
        raise ProblemFormatError("field 'n': not an integer") from None
    if n < 1:
        raise ProblemFormatError("field 'n': must be at least 1")
    row = _parse_floats(fields["first_row"].split(), "first_row")
    if len(row) != n:
        raise ProblemFormatError(
            f"field 'first_row': expected {n} entries, got {len(row)}"
        )
    return _finish(n, row, fields["rhs"].split(), "rhs")


def _parse_csv(lines) -> ProblemFile:
    if len(lines) != 2:
        raise ProblemFormatError(
            f"CSV problem needs exactly 2 data lines, got {len(lines)}"
        )
    row = _parse_floats([t for t in lines[0].split(",") if t.strip()], "first_row")
    rhs_tokens = [t.strip() for t in lines[1].split(",") if t.strip()]
    return _finish(len(row), row, rhs_tokens, "rhs")


def _finish(n: int, row, rhs_tokens, field: str) -> ProblemFile:
    spec = make_spec(row)  # symmetry/finiteness errors propagate with indices
    if rhs_tokens and rhs_tokens[0] == "constant":
        if len(rhs_tokens) != 2:
            raise ProblemFormatError(
                f"field '{field}': constant form is 'constant <value>'"
            )
        beta = _parse_floats(rhs_tokens[1:], field)[0]
        return ProblemFile(n=n, first_row=spec.first_row, rhs=None, constant=beta)
    rhs = _parse_floats(rhs_tokens, field)
    if len(rhs) != n:
        raise ProblemFormatError(
            f"field '{field}': expected {n} entries, got {len(rhs)}"
        )
    return ProblemFile(
        n=n, first_row=spec.first_row, rhs=np.asarray(rhs, dtype=np.float64),
        constant=None,
    )


def serialize_problem(problem: ProblemFile) -> str:
    """Canonical text form: fixed key order, shortest round-trip floats."""
    lines = [
        f"n: {problem.n}",
        "first_row: " + " ".join(_fmt(v) for v in problem.first_row),
    ]
    if problem.rhs is None:
        lines.append(f"rhs: constant {_fmt(problem.constant)}")
    else:
        lines.append("rhs: " + " ".join(_fmt(v) for v in problem.rhs))
    return "\n".join(lines) + "\n"


def load_problem(path: str) -> ProblemFile:
    if path == "-":
        return parse_problem(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# solve / spectrum


def _cmd_solve(args) -> int:
    problem = load_problem(args.input)
    spec = make_spec(problem.first_row)
    tolerance = args.tolerance if args.tolerance is not None else DEFAULT_SINGULAR_TOLERANCE
    report = solve(
        spec,
        problem.rhs_vector(),
        _PATH_FLAGS[args.path],
        singular_tolerance=tolerance,
    )
    x = report.solution
    if args.format == "text":
        print(f"path: {report.path.value}")
        print(f"residual_inf: {_fmt(report.residual_inf_norm)}")
        print(f"spectrum_min_abs: {_fmt(report.spectrum_min_abs)}")
        print("x: " + " ".join(_fmt(v) for v in x))
    elif args.format == "csv":
        print(
            f"# path={report.path.value} "
            f"residual_inf={_fmt(report.residual_inf_norm)} "
            f"spectrum_min_abs={_fmt(report.spectrum_min_abs)}"
        )
        print(",".join(_fmt(v) for v in x))
    else:
        print(
            json.dumps(
                {
                    "path": report.path.value,
                    "residual_inf": report.residual_inf_norm,
                    "spectrum_min_abs": report.spectrum_min_abs,
                    "x": [float(v) for v in x],
                }
            )
        )
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    if args.row is not None:
        row = _parse_floats([t for t in args.row.split(",") if t.strip()], "row")
        spec = make_spec(row)
    elif args.input is not None:
        spec = make_spec(load_problem(args.input).first_row)
    else:
        raise ProblemFormatError("provide a problem file or --row")
    tolerance = args.tolerance if args.tolerance is not None else DEFAULT_SINGULAR_TOLERANCE
    s = spectrum(spec, singular_tolerance=tolerance)
    rep = is_singular(s)
    if args.format == "text":
        print("psi: " + " ".join(_fmt(v) for v in s.values))
        print(f"singular: {'true' if rep.singular else 'false'}")
        if rep.singular:
            print("near_zero: " + " ".join(str(k) for k in rep.offending))
    elif args.format == "csv":
        print(",".join(_fmt(v) for v in s.values))
    else:
        print(
            json.dumps(
                {
                    "psi": [float(v) for v in s.values],
                    "singular": rep.singular,
                    "near_zero": list(rep.offending),
                }
            )
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _cmd_gen(args) -> int:
    spec = oracle.random_spec(args.n, args.seed)
    if args.rhs == "constant":
        problem = ProblemFile(
            n=args.n, first_row=spec.first_row, rhs=None, constant=args.beta
        )
    else:
        problem = ProblemFile(
            n=args.n,
            first_row=spec.first_row,
            rhs=oracle.random_rhs(args.n, args.seed),
            constant=None,
        )
    _write_text(args.out, serialize_problem(problem))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


@dataclass(frozen=True)
class VerifyCase:
    n: int
    seed: int
    direct_vs_dense: float
    fft_vs_direct: float
    eigenvalue_gap: float
    residual: float
    passed: bool


def run_verification(
    n_lo: int,
    n_hi: int,
    seed_count: int,
    base_seed: int = 0,
    perturb_eigenvalue: int | None = None,
) -> list[VerifyCase]:
    """Three-way agreement sweep plus the eigenvalue cross-check."""
    cases = []
    for n in range(n_lo, n_hi + 1):
        for offset in range(seed_count):
            seed = base_seed + offset
            spec = oracle.random_spec(n, seed)
            b = oracle.random_rhs(n, seed)
            dense = oracle.materialize(spec)
            x_dense = oracle.dense_solve(dense, b)
            s = spectrum(spec)
            if perturb_eigenvalue is not None and perturb_eigenvalue < n:
                bent = s.values.copy()
                bent[perturb_eigenvalue] *= 1.0 + 1e-3
                s = Spectrum(values=bent, singular_tolerance=s.singular_tolerance)
            x_direct = solve_direct(spec, b, eigenvalues=s)
            x_fft = solve_fft(spec, b)
            eigs = oracle.dense_eigenvalues(dense)
            x_scale = 1.0 + float(np.abs(x_direct).max())
            d_vs_o = float(np.abs(x_direct - x_dense).max())
            f_vs_d = float(np.abs(x_fft - x_direct).max())
            eig_gap = float(np.abs(np.sort(s.values) - eigs).max())
            resid = float(np.abs(matvec(spec, x_direct) - b).max())
            passed = (
                d_vs_o <= _VERIFY_DIRECT_VS_DENSE * x_scale
                and f_vs_d <= _VERIFY_FFT_VS_DIRECT * x_scale
                and eig_gap <= _VERIFY_EIGENVALUES * float(np.abs(s.values).max())
                and resid <= _VERIFY_RESIDUAL * (1.0 + float(np.abs(b).max()))
            )
            cases.append(
                VerifyCase(n, seed, d_vs_o, f_vs_d, eig_gap, resid, passed)
            )
    return cases


def _cmd_verify(args) -> int:
    if args.n_max > oracle.DENSE_CAP_DEFAULT:
        raise ProblemFormatError(
            f"--n-max {args.n_max} exceeds the dense cap {oracle.DENSE_CAP_DEFAULT}"
        )
    if args.n_min < 1 or args.n_min > args.n_max or args.seeds < 1:
        raise ProblemFormatError("need 1 <= --n-min <= --n-max and --seeds >= 1")
    cases = run_verification(
        args.n_min, args.n_max, args.seeds, args.seed, args.perturb_eigenvalue
    )
    for case in cases:
        status = "ok" if case.passed else "FAIL"
        print(
            f"n={case.n:4d} seed={case.seed:4d} "
            f"direct_vs_dense={case.direct_vs_dense:.3e} "
            f"fft_vs_direct={case.fft_vs_direct:.3e} "
            f"eigenvalues={case.eigenvalue_gap:.3e} "
            f"residual={case.residual:.3e} {status}"
        )
    passed = sum(1 for c in cases if c.passed)
    print(f"verify: {passed}/{len(cases)} cases passed")
    if passed != len(cases):
        worst = max(
            (c for c in cases if not c.passed),
            key=lambda c: max(c.direct_vs_dense, c.fft_vs_direct, c.eigenvalue_gap),
        )
        print(
            f"worst offender: n={worst.n} seed={worst.seed} "
            f"direct_vs_dense={worst.direct_vs_dense:.3e} "
            f"fft_vs_direct={worst.fft_vs_direct:.3e} "
            f"eigenvalues={worst.eigenvalue_gap:.3e}",
            file=sys.stderr,
        )
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


@dataclass(frozen=True)
class BenchRow:
    n: int
    path: str
    median_ns: int
    mad_ns: int
    residual_inf: float


def _bench_kernel(path: str, spec, b, dense):
    if path == "direct":
        return lambda: solve_direct(spec, b)
    if path == "fft":
        return lambda: solve_fft(spec, b)
    if path == "dense":
        return lambda: oracle.dense_solve(dense, b)
    raise ProblemFormatError(f"unknown bench path '{path}'")


def run_benchmark(
    sizes,
    repetitions: int = 9,
    warmup: int = 2,
    paths=("direct", "fft"),
    seed: int = 0,
) -> list[BenchRow]:
    """Median-of-repetitions timing of the solve kernels.

    The residual column is computed once per row, outside the timed
    region; timing covers the solver kernel alone.
    """
    rows = []
    for n in sizes:
        spec = oracle.random_spec(n, seed)
        b = oracle.random_rhs(n, seed)
        dense = None
        for path in paths:
            if path == "dense":
                if n > oracle.DENSE_CAP_DEFAULT:
                    print(
                        f"bench: skipping dense at n={n} (above cap)",
                        file=sys.stderr,
                    )
                    continue
                dense = oracle.materialize(spec)
            kernel = _bench_kernel(path, spec, b, dense)
            for _ in range(warmup):
                x = kernel()
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter_ns()
                x = kernel()
                samples.append(time.perf_counter_ns() - t0)
            med = float(np.median(samples))
            mad = float(np.median(np.abs(np.asarray(samples) - med)))
            residual = float(np.abs(matvec(spec, x) - b).max())
            rows.append(
                BenchRow(
                    n=n,
                    path=path,
                    median_ns=int(med),
                    mad_ns=int(mad),
                    residual_inf=residual,
                )
            )
    return rows


def fit_scaling(rows) -> dict[str, float]:
    """Least-squares slope of log(median time) against log(n), per path."""
    fits = {}
    by_path: dict[str, list[BenchRow]] = {}
    for row in rows:
        by_path.setdefault(row.path, []).append(row)
    for path, group in by_path.items():
        if len(group) < 2:
            continue
        logs_n = np.log([r.n for r in group])
        logs_t = np.log([max(r.median_ns, 1) for r in group])
        fits[path] = float(np.polyfit(logs_n, logs_t, 1)[0])
    return fits


def render_bench_csv(rows, fits) -> str:
    lines = ["n,path,median_ns,mad_ns,residual_inf"]
    for r in rows:
        lines.append(
            f"{r.n},{r.path},{r.median_ns},{r.mad_ns},{_fmt(r.residual_inf)}"
        )
    for path in sorted(fits):
        lines.append(f"# scaling_exponent,{path},{fits[path]:.4f}")
    return "\n".join(lines) + "\n"


def _cmd_bench(args) -> int:
    sizes = [int(t) for t in args.sizes.split(",") if t.strip()]
    if not sizes or any(s < 1 for s in sizes) or sizes != sorted(sizes):
        raise ProblemFormatError("--sizes must be positive and sorted ascending")
    paths = [t.strip() for t in args.paths.split(",") if t.strip()]
    for p in paths:
        if p not in ("direct", "fft", "dense"):
            raise ProblemFormatError(f"unknown bench path '{p}'")
    rows = run_benchmark(sizes, args.reps, args.warmup, paths, args.seed)
    fits = fit_scaling(rows)
    _write_text(args.out, render_bench_csv(rows, fits))
    if args.out != "-":
        for path, slope in sorted(fits.items()):
            print(f"bench: {path} scaling exponent {slope:.3f}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circulant",
        description="Solve symmetric circulant real linear systems.",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="relative singularity tolerance (default 1e-10)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("input", help="problem file path, or - for stdin")
    p_solve.add_argument(
        "--path", choices=sorted(_PATH_FLAGS), default="auto",
        help="force a solution path",
    )
    p_solve.add_argument(
        "--format", choices=("text", "csv", "json"), default="text"
    )
    p_solve.set_defaults(func=_cmd_solve)

    p_spec = sub.add_parser("spectrum", help="print the eigenvalues")
    p_spec.add_argument("input", nargs="?", help="problem file path, or - for stdin")
    p_spec.add_argument("--row", help="first row as comma-separated values")
    p_spec.add_argument(
        "--format", choices=("text", "csv", "json"), default="text"
    )
    p_spec.set_defaults(func=_cmd_spectrum)

    p_gen = sub.add_parser("gen", help="generate a random well-conditioned problem")
    p_gen.add_argument("n", type=int)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default="-", help="output path, or - for stdout")
    p_gen.add_argument("--rhs", choices=("random", "constant"), default="random")
    p_gen.add_argument("--beta", type=float, default=1.0,
                       help="value for --rhs constant")
    p_gen.set_defaults(func=_cmd_gen)

    p_verify = sub.add_parser(
        "verify", help="cross-check solver paths against the dense oracle"
    )
    p_verify.add_argument("--n-min", type=int, default=1)
    p_verify.add_argument("--n-max", type=int, default=32)
    p_verify.add_argument("--seeds", type=int, default=5,
                          help="seeds per size")
    p_verify.add_argument("--seed", type=int, default=0, help="base seed")
    p_verify.add_argument(
        "--perturb-eigenvalue", type=int, default=None, metavar="K",
        help="fault injection: bend eigenvalue K before the direct solve",
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="time the solve paths")
    p_bench.add_argument("--sizes", default="256,1024,4096",
                         help="comma-separated, ascending")
    p_bench.add_argument("--reps", type=int, default=9)
    p_bench.add_argument("--warmup", type=int, default=2)
    p_bench.add_argument("--paths", default="direct,fft",
                         help="subset of direct,fft,dense")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default="-", help="CSV path, or - for stdout")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    tolerance = args.tolerance
    if tolerance is not None and not tolerance >= 0:
        print("error: --tolerance must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except SingularSystem as exc:
        detail = " ".join(
            f"k={k} |psi|={abs(v):.6g}" for k, v in zip(exc.indices, exc.values)
        )
        print(f"error: singular system: {detail}", file=sys.stderr)
        return EXIT_SINGULAR
    except (CirculantError, ProblemFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())
