"""Command-line interface: output contracts and exit codes.

Exit code contract: 0 when every check passes, 1 when any check fails,
2 on usage or parse errors.  With --json the canonical report is the only
thing on stdout.
"""

import json
import subprocess
import sys

import pytest

_BASE = [sys.executable, "-m", "satflow"]


def _run(*args):
    return subprocess.run(_BASE + list(args), capture_output=True, text=True)


class TestFlow:
    def test_human_output_prints_matrix(self):
        result = _run("flow", "--system", "counterexample",
                      "--from", "0", "--to", "1")
        assert result.returncode == 0
        assert "0.7071067812" in result.stdout
        assert "0.9428090416" in result.stdout
        assert "-0.3535533906" in result.stdout
        assert result.stdout.rstrip().endswith("PASS")

    def test_json_output(self):
        result = _run("flow", "--json")
        assert result.returncode == 0
        data = json.loads(result.stdout)
        assert data["command"] == "flow"
        assert data["params"]["system"] == "counterexample"
        matrix = data["params"]["transition"]
        assert matrix[0][0] == pytest.approx(0.7071067811865476, rel=1e-9)
        assert all(check["passed"] for check in data["checks"])

    def test_json_is_only_stdout_content(self):
        result = _run("flow", "--json")
        json.loads(result.stdout)  # the whole stream must parse

    def test_expression_system(self):
        result = _run("flow", "--system", "0.5", "-n", "2",
                      "--from", "0", "--to", "1")
        assert result.returncode == 0

    def test_malformed_expression_exits_2_with_position(self):
        result = _run("flow", "--system", "2*t^^2")
        assert result.returncode == 2
        assert "position" in result.stderr

    def test_norm_choices(self):
        for norm in ("spectral", "frobenius", "inf"):
            result = _run("flow", "--norm", norm, "--json")
            assert result.returncode == 0

    def test_out_of_range_tolerance_exits_2(self):
        result = _run("flow", "--tol", "1e-20")
        assert result.returncode == 2

    def test_wall_time_on_stderr(self):
        result = _run("flow", "--json")
        assert "wall_time_ms=" in result.stderr


class TestUsageErrors:
    def test_unknown_flag(self):
        result = _run("flow", "--bogus")
        assert result.returncode == 2

    def test_missing_subcommand(self):
        result = _run()
        assert result.returncode == 2

    def test_unknown_subcommand(self):
        result = _run("frobnicate")
        assert result.returncode == 2

    def test_bad_norm_value(self):
        result = _run("flow", "--norm", "manhattan")
        assert result.returncode == 2


class TestCounterexample:
    def test_csv_has_header_plus_horizon_rows(self, tmp_path):
        path = tmp_path / "rows.csv"
        result = _run("counterexample", "--horizon", "3",
                      "--csv", str(path), "--json")
        assert result.returncode == 0
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0].startswith("m,r_m,deficit,B11")
        data = json.loads(result.stdout)
        assert len(data["tables"]["scenario"]) == 3

    def test_zero_horizon_exits_2(self):
        result = _run("counterexample", "--horizon", "0")
        assert result.returncode == 2

    def test_failing_check_exits_1(self):
        # epsilon far below the candidate's actual distance
        result = _run("counterexample", "--horizon", "2",
                      "--epsilon", "1e-6")
        assert result.returncode == 1
        assert "FAIL" in result.stdout


class TestLift:
    def test_planar_dimension_exits_2(self):
        result = _run("lift", "-n", "2")
        assert result.returncode == 2

    def test_oversized_dimension_exits_2(self):
        result = _run("lift", "-n", "9")
        assert result.returncode == 2

    def test_small_run_passes(self):
        result = _run("lift", "-n", "3", "--horizon", "2", "--json")
        assert result.returncode == 0
        data = json.loads(result.stdout)
        assert data["command"] == "lift"
        assert len(data["tables"]["lift"]) == 2
        assert all(check["passed"] for check in data["checks"])


class TestAxioms:
    def test_run_and_param_echo(self):
        result = _run("axioms", "--m-max", "2", "--window=-10:10",
                      "--grid", "201", "--json")
        assert result.returncode == 0
        data = json.loads(result.stdout)
        assert data["params"]["window"] == [-10.0, 10.0]
        assert data["params"]["grid"] == 201
        names = [check["name"] for check in data["checks"]]
        assert names == ["one_step_factorization", "two_sided_growth",
                         "shift_invariance", "growth_bound"]

    def test_bad_window_exits_2(self):
        result = _run("axioms", "--window", "abc")
        assert result.returncode == 2
