"""End-to-end tests for the problem-file runner: exit codes, report
determinism, and the series emitter."""

import csv
import json
import math

import pytest

from fieldpath.cli import TASKS, main, run_problem

PROBLEMS = "demos/problems"


def write_problem(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_list_tasks_subcommand(capsys):
    assert main(["list-tasks"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == list(TASKS)
    assert len(lines) == 10


def test_list_tasks_flag(capsys):
    assert main(["--list-tasks"]) == 0
    assert capsys.readouterr().out.splitlines() == list(TASKS)


def test_bundled_problems_exit_zero(capsys):
    for name in ("circle_solve_e.json", "helix_solve_p.json",
                 "partition_filter.json"):
        assert main(["run", f"{PROBLEMS}/{name}"]) == 0, name
        assert "result: pass" in capsys.readouterr().out


def test_report_bytes_identical_across_runs(tmp_path, capsys):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert main(["run", f"{PROBLEMS}/circle_solve_e.json",
                 "--out", str(out1)]) == 0
    assert main(["run", f"{PROBLEMS}/circle_solve_e.json",
                 "--out", str(out2)]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()


def test_series_rows_and_reingestion(tmp_path, capsys):
    out = tmp_path / "report.json"
    series = tmp_path / "series.csv"
    assert main(["run", f"{PROBLEMS}/circle_solve_e.json",
                 "--out", str(out), "--series", str(series)]) == 0
    capsys.readouterr()
    with open(series, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x1", "x2", "f", "E_on_curve", "residual"]
    data = rows[1:]
    assert len(data) == 6284
    # repr round-trips floats, so the re-ingested residual matches the
    # report's diagnostic bit for bit
    report = json.loads(out.read_text())
    worst = max(abs(float(r[-1])) for r in data)
    assert worst == report["diagnostics"]["max_composition_residual"]
    assert worst <= 1e-6


def test_verify_failure_exits_two(tmp_path, capsys):
    path = write_problem(tmp_path, "bad.json", {
        "task": "verify", "dimension": 2, "E": "x1^2", "curve": ["t"],
        "f": "t^2 + 0.1", "t0": 0.0, "t1": 1.0,
    })
    out = tmp_path / "report.json"
    assert main(["run", path, "--out", str(out)]) == 2
    assert "FAIL" in capsys.readouterr().out
    report = json.loads(out.read_text())
    residuals = {v["name"]: v["residual"] for v in report["verdicts"]}
    assert residuals["composition"] == pytest.approx(0.1, rel=1e-9)
    assert residuals["derivative"] <= 1e-9


def test_non_skew_matrix_exits_one(tmp_path, capsys):
    path = write_problem(tmp_path, "skew.json", {
        "task": "solve-e", "dimension": 3, "E": "x1",
        "b": [[0.0, 1.0], [1.0, 0.0]], "x0": [1.0, 0.0],
        "t0": 0.0, "t1": 1.0,
    })
    assert main(["run", path]) == 1
    err = capsys.readouterr().err
    assert "(1,2)" in err and "skew" in err


def test_missing_field_exits_one(tmp_path, capsys):
    path = write_problem(tmp_path, "missing.json",
                         {"task": "solve-e", "dimension": 3, "E": "x1"})
    assert main(["run", path]) == 1
    assert "'b'" in capsys.readouterr().err


def test_unknown_task_exits_one(tmp_path, capsys):
    path = write_problem(tmp_path, "task.json", {"task": "solve-q"})
    assert main(["run", path]) == 1
    assert "task" in capsys.readouterr().err


def test_malformed_json_exits_one(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["run", str(path)]) == 1
    assert "JSON" in capsys.readouterr().err


def test_missing_file_exits_one(capsys):
    assert main(["run", "/nonexistent/problem.json"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_bad_expression_exits_one(tmp_path, capsys):
    path = write_problem(tmp_path, "expr.json", {
        "task": "derive", "dimension": 2, "E": "x1 +* 2", "curve": ["t"],
    })
    assert main(["run", path]) == 1
    assert "'E'" in capsys.readouterr().err


def test_tol_flag_overrides_file(tmp_path, capsys):
    payload = {
        "task": "verify", "dimension": 2, "E": "x1^2", "curve": ["t"],
        "f": "t^2 + 1e-8", "t0": 0.0, "t1": 1.0, "tol": 1e-6,
    }
    path = write_problem(tmp_path, "tol.json", payload)
    assert main(["run", path]) == 0
    capsys.readouterr()
    assert main(["run", path, "--tol", "1e-9"]) == 2
    capsys.readouterr()


def test_step_flag_changes_grid(tmp_path, capsys):
    payload = {
        "task": "solve-e", "dimension": 3, "E": "x1^2 + x2^2",
        "b": [[0.0, 1.0], [-1.0, 0.0]], "x0": [1.0, 0.0],
        "t0": 0.0, "t1": 1.0, "tol": 1e-3,
    }
    path = write_problem(tmp_path, "step.json", payload)
    series = tmp_path / "s.csv"
    assert main(["run", path, "--step", "0.25",
                 "--series", str(series)]) == 0
    capsys.readouterr()
    with open(series) as fh:
        assert len(fh.readlines()) == 1 + 5


def test_flat_matrix_accepted(tmp_path, capsys):
    path = write_problem(tmp_path, "flat.json", {
        "task": "pairing", "dimension": 3, "E": "x1*x2 + t",
        "b": [0.0, 1.0, -1.0, 0.0],
    })
    assert main(["run", path]) == 0
    capsys.readouterr()


def test_series_header_only_for_scalar_tasks(tmp_path, capsys):
    path = write_problem(tmp_path, "hj.json",
                         {"task": "hj", "S": "q1^2/(2*t + 2)",
                          "H": "p1^2/2", "tol": 1e-12})
    series = tmp_path / "empty.csv"
    assert main(["run", path, "--series", str(series)]) == 0
    capsys.readouterr()
    assert series.read_text().splitlines() == ["t"]


def test_filter_limit_failure_exits_two(tmp_path, capsys):
    path = write_problem(tmp_path, "filter.json", {
        "task": "filter", "D": ["d1", "d2"], "blocks": [["d1"], ["d2"]],
        "K": ["a", "b"], "map": {"d1": "a", "d2": "b"},
        "block": 0, "A": ["b"],
    })
    assert main(["run", path]) == 2
    assert "limit" in capsys.readouterr().out


def test_run_problem_rejects_non_object():
    with pytest.raises(Exception):
        run_problem(["not", "a", "dict"])


def test_solve_f_report_fields(tmp_path, capsys):
    path = write_problem(tmp_path, "f.json", {
        "task": "solve-f", "dimension": 3, "f": "t^2",
        "x0": [0.5, -0.25], "G": "xi1^2 + xi2^2",
        "t0": 0.0, "t1": 1.0,
    })
    out = tmp_path / "report.json"
    assert main(["run", path, "--out", str(out)]) == 0
    capsys.readouterr()
    report = json.loads(out.read_text())
    assert report["task"] == "solve-f"
    assert report["outputs"]["H"] == "2*t"
    assert len(report["outputs"]["curve"]) == 2
    assert report["passed"] is True


def test_ball_limit_task(tmp_path, capsys):
    path = write_problem(tmp_path, "ball.json", {
        "task": "ball-limit", "dimension": 3, "E": "x1^2 + x2^2 + t",
        "curve": ["cos(t)", "sin(t)"], "t0": math.pi / 4, "tol": 1e-6,
    })
    out = tmp_path / "report.json"
    assert main(["run", path, "--out", str(out)]) == 0
    capsys.readouterr()
    report = json.loads(out.read_text())
    assert report["outputs"]["limit"] == pytest.approx(1.0, abs=1e-9)
    assert len(report["outputs"]["deviations"]) == 13


def test_usage_error_exits_one(capsys):
    assert main(["run"]) == 1
    capsys.readouterr()
    assert main(["frobnicate"]) == 1
    capsys.readouterr()
