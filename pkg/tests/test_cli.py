"""CLI surface: file formats, subcommands, exit codes."""

import io
import json

import numpy as np
import pytest

from circulant import materialize, make_spec
from circulant.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_SINGULAR,
    EXIT_VERIFY_FAILED,
    ProblemFormatError,
    main,
    parse_problem,
    serialize_problem,
)

CANONICAL = "n: 4\nfirst_row: 4.0 1.0 0.0 1.0\nrhs: 6.0 6.0 6.0 6.0\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestProblemFormat:
    def test_round_trip_is_canonical(self):
        problem = parse_problem(CANONICAL)
        assert serialize_problem(problem) == CANONICAL

    def test_serialize_normalizes_layout(self):
        messy = "# comment\nrhs:   6 6.0 6 6\n\nn: 4\nfirst_row: 4 1 0 1\n"
        assert serialize_problem(parse_problem(messy)) == CANONICAL

    def test_serialize_parse_idempotent(self):
        once = serialize_problem(parse_problem(CANONICAL))
        twice = serialize_problem(parse_problem(once))
        assert once == twice

    def test_constant_rhs_form(self):
        problem = parse_problem("n: 3\nfirst_row: 2 1 1\nrhs: constant 5\n")
        assert problem.constant == 5.0
        assert problem.rhs is None
        np.testing.assert_array_equal(problem.rhs_vector(), [5.0, 5.0, 5.0])
        assert "rhs: constant 5.0" in serialize_problem(problem)

    def test_csv_form(self):
        problem = parse_problem("4,1,0,1\n6,6,6,6\n")
        assert problem.n == 4
        np.testing.assert_array_equal(problem.first_row, [4, 1, 0, 1])
        np.testing.assert_array_equal(problem.rhs, [6, 6, 6, 6])

    def test_csv_constant_form(self):
        problem = parse_problem("2,1,1\nconstant,5\n")
        assert problem.constant == 5.0

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("", "empty"),
            ("n: x\nfirst_row: 1\nrhs: 1\n", "'n'"),
            ("n: 0\nfirst_row:\nrhs:\n", "'n'"),
            ("n: 2\nfirst_row: 1 0 0\nrhs: 1 1\n", "first_row"),
            ("n: 2\nfirst_row: 1 0\nrhs: 1\n", "rhs"),
            ("n: 2\nfirst_row: 1 0\nrhs: 1 oops\n", "rhs"),
            ("n: 2\nfirst_row: 1 0\nrhs: 1 1\nbogus: 3\n", "bogus"),
            ("n: 2\nn: 2\nfirst_row: 1 0\nrhs: 1 1\n", "duplicate"),
            ("1,2,3\n", "2 data lines"),
        ],
    )
    def test_parse_errors_name_the_field(self, text, fragment):
        with pytest.raises(ProblemFormatError) as err:
            parse_problem(text)
        assert fragment in str(err.value)

    def test_float_round_trip_is_bit_exact(self):
        value = 0.1 + 0.2  # not representable prettily
        text = f"n: 1\nfirst_row: {value!r}\nrhs: {value!r}\n"
        problem = parse_problem(serialize_problem(parse_problem(text)))
        assert problem.first_row[0] == value
        assert problem.rhs[0] == value


class TestSolveCommand:
    def test_constant_path_output(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", CANONICAL)
        assert main(["solve", path]) == EXIT_OK
        out = capsys.readouterr().out
        assert "path: constant-rhs" in out
        assert "x: 1.0 1.0 1.0 1.0" in out

    def test_symmetry_violation_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", "n: 4\nfirst_row: 4 1 0 2\nrhs: 1 2 3 4\n")
        assert main(["solve", path]) == EXIT_INPUT
        err = capsys.readouterr().err
        assert "first_row[1]" in err and "first_row[3]" in err

    def test_singular_exit_3(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", "n: 4\nfirst_row: 2 1 0 1\nrhs: 1 2 3 4\n")
        assert main(["solve", path]) == EXIT_SINGULAR
        err = capsys.readouterr().err
        assert "k=2" in err and "|psi|=" in err

    def test_missing_file_exit_2(self, capsys):
        assert main(["solve", "/nonexistent/problem.txt"]) == EXIT_INPUT
        assert capsys.readouterr().err.startswith("error:")

    def test_stdin_input(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(CANONICAL))
        assert main(["solve", "-"]) == EXIT_OK
        assert "constant-rhs" in capsys.readouterr().out

    def test_json_format(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", "n: 3\nfirst_row: 2 1 1\nrhs: 4 1 1\n")
        assert main(["solve", path, "--format", "json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["path"] == "direct"
        np.testing.assert_allclose(payload["x"], [2.5, -0.5, -0.5], atol=1e-12)
        assert payload["residual_inf"] <= 1e-12

    def test_csv_format(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", CANONICAL)
        assert main(["solve", path, "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("# path=constant-rhs")
        assert [float(v) for v in lines[1].split(",")] == [1.0] * 4

    def test_forced_paths_agree(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", "n: 4\nfirst_row: 4 1 0 1\nrhs: 1 2 3 4\n")
        results = {}
        for flag in ("direct", "fft"):
            assert main(["solve", path, "--path", flag, "--format", "json"]) == EXIT_OK
            payload = json.loads(capsys.readouterr().out)
            assert payload["path"] == flag
            results[flag] = payload["x"]
        np.testing.assert_allclose(results["direct"], results["fft"], atol=1e-12)

    def test_reparsed_solution_satisfies_residual(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", "n: 5\nfirst_row: 6 1 -2 -2 1\nrhs: 3 -1 4 1 -5\n")
        assert main(["solve", path]) == EXIT_OK
        out = capsys.readouterr().out
        x_line = next(ln for ln in out.splitlines() if ln.startswith("x: "))
        x = np.array([float(t) for t in x_line[3:].split()])
        dense = materialize(make_spec([6, 1, -2, -2, 1])).entries
        b = np.array([3.0, -1.0, 4.0, 1.0, -5.0])
        assert np.abs(dense @ x - b).max() <= 1e-8 * (1 + np.abs(b).max())

    def test_global_tolerance_flag(self, tmp_path, capsys):
        # psi_2 = 5e-8: accepted at the default tolerance, singular at 1e-3
        near = f"n: 4\nfirst_row: {2 + 2.5e-8!r} 1.0 0.0 1.0\nrhs: 1 2 3 4\n"
        path = write(tmp_path, "p.txt", near)
        assert main(["solve", path]) == EXIT_OK
        capsys.readouterr()
        assert main(["--tolerance", "1e-3", "solve", path]) == EXIT_SINGULAR
        assert "k=2" in capsys.readouterr().err


class TestSpectrumCommand:
    def test_row_flag(self, capsys):
        assert main(["spectrum", "--row", "4,1,0,1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0].startswith("psi: 6.0 4.0 2.0")
        assert "singular: false" in out

    def test_identity_row(self, capsys):
        assert main(["spectrum", "--row", "1,0,0,0"]) == EXIT_OK
        assert "psi: 1.0 1.0 1.0 1.0" in capsys.readouterr().out

    def test_odd_row(self, capsys):
        assert main(["spectrum", "--row", "2,1,1"]) == EXIT_OK
        out = capsys.readouterr().out
        psi = [float(t) for t in out.splitlines()[0][5:].split()]
        np.testing.assert_allclose(psi, [4, 1, 1], atol=1e-14)

    def test_near_zero_flagged(self, capsys):
        assert main(["spectrum", "--row", "2,1,0,1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "singular: true" in out
        assert "near_zero: 2" in out

    def test_problem_file_input(self, tmp_path, capsys):
        path = write(tmp_path, "p.txt", CANONICAL)
        assert main(["spectrum", path, "--format", "json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(payload["psi"], [6, 4, 2, 4], atol=1e-12)
        assert payload["singular"] is False

    def test_parse_failure_exit_2(self, capsys):
        assert main(["spectrum", "--row", "4,oops,0,1"]) == EXIT_INPUT
        assert main(["spectrum"]) == EXIT_INPUT
        capsys.readouterr()


class TestGenCommand:
    def test_deterministic_bytes(self, tmp_path, capsys):
        a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        assert main(["gen", "8", "--seed", "42", "--out", a]) == EXIT_OK
        assert main(["gen", "8", "--seed", "42", "--out", b]) == EXIT_OK
        assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()

    def test_generated_problem_solves(self, tmp_path, capsys):
        path = str(tmp_path / "gen.txt")
        assert main(["gen", "12", "--seed", "3", "--out", path]) == EXIT_OK
        assert main(["solve", path]) == EXIT_OK
        capsys.readouterr()

    def test_degenerate_n1(self, tmp_path, capsys):
        path = str(tmp_path / "one.txt")
        assert main(["gen", "1", "--seed", "7", "--out", path]) == EXIT_OK
        assert main(["solve", path]) == EXIT_OK
        capsys.readouterr()

    def test_constant_rhs_flag(self, tmp_path, capsys):
        path = str(tmp_path / "c.txt")
        assert main(["gen", "6", "--seed", "1", "--rhs", "constant",
                     "--beta", "2.5", "--out", path]) == EXIT_OK
        assert "rhs: constant 2.5" in (tmp_path / "c.txt").read_text()
        assert main(["solve", path]) == EXIT_OK
        assert "path: constant-rhs" in capsys.readouterr().out

    def test_unwritable_path_exit_2(self, capsys):
        assert main(["gen", "4", "--out", "/nonexistent/dir/x.txt"]) == EXIT_INPUT
        capsys.readouterr()

    def test_round_trips_through_parser(self, tmp_path, capsys):
        path = str(tmp_path / "g.txt")
        assert main(["gen", "9", "--seed", "11", "--out", path]) == EXIT_OK
        text = (tmp_path / "g.txt").read_text()
        assert serialize_problem(parse_problem(text)) == text


class TestVerifyCommand:
    def test_small_sweep_passes(self, capsys):
        assert main(["verify", "--n-max", "8", "--seeds", "2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "verify: 16/16 cases passed" in out

    def test_even_and_odd_sizes_reported(self, capsys):
        assert main(["verify", "--n-min", "7", "--n-max", "8", "--seeds", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "n=   7" in out and "n=   8" in out

    def test_injected_fault_caught(self, capsys):
        rc = main(["verify", "--n-max", "6", "--seeds", "1",
                   "--perturb-eigenvalue", "1"])
        assert rc == EXIT_VERIFY_FAILED
        captured = capsys.readouterr()
        assert "FAIL" in captured.out
        assert "worst offender" in captured.err

    def test_bad_range_exit_2(self, capsys):
        assert main(["verify", "--n-min", "5", "--n-max", "2"]) == EXIT_INPUT
        assert main(["verify", "--n-max", "100000"]) == EXIT_INPUT
        capsys.readouterr()


class TestBenchCommand:
    def test_csv_schema_and_fit_footer(self, tmp_path, capsys):
        out_path = str(tmp_path / "bench.csv")
        rc = main(["bench", "--sizes", "8,16,32", "--reps", "2",
                   "--warmup", "1", "--paths", "direct,fft,dense",
                   "--out", out_path])
        assert rc == EXIT_OK
        lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
        assert lines[0] == "n,path,median_ns,mad_ns,residual_inf"
        data = [ln for ln in lines if not ln.startswith("#")][1:]
        assert len(data) == 9  # 3 sizes x 3 paths
        for ln in data:
            n, path, med, mad, resid = ln.split(",")
            assert path in ("direct", "fft", "dense")
            assert int(med) > 0 and int(mad) >= 0
            assert float(resid) <= 1e-8 * 2.0
        footers = [ln for ln in lines if ln.startswith("# scaling_exponent")]
        assert {ln.split(",")[1] for ln in footers} == {"direct", "fft", "dense"}

    def test_stdout_output(self, capsys):
        rc = main(["bench", "--sizes", "8,16", "--reps", "1", "--warmup", "0"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("n,path,median_ns")

    @pytest.mark.parametrize(
        "sizes", ["32,16", "0,8", "", "8,notanumber"]
    )
    def test_invalid_sizes_exit_2(self, sizes, capsys):
        assert main(["bench", "--sizes", sizes]) == EXIT_INPUT
        capsys.readouterr()

    def test_unknown_path_exit_2(self, capsys):
        assert main(["bench", "--sizes", "8", "--paths", "warp"]) == EXIT_INPUT
        capsys.readouterr()
