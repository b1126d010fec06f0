"""Batch front end: read a JSON problem file, dispatch to the solvers and
checkers, print a human-readable report, and optionally write a
machine-readable report and a plot-ready series file.

Exit codes: 0 all verdicts pass, 1 input or solver error, 2 verdict failed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import expr as ex
from .calculus import (
    Curve,
    PathFunction,
    ScalarField,
    ToleranceConfig,
    advective_term_expression,
    compose,
    spatial_names,
    time_partial,
    total_derivative,
    total_derivative_expression,
)
from .cases import (
    CaseDiagnostics,
    CaseSolution,
    SkewMatrix,
    solve_e_case,
    solve_f_case,
    solve_p_case,
    verify_composition,
)
from .errors import FieldPathError
from .filters import (
    ElementMap,
    FiniteSpace,
    Partition,
    ball_filter_limit,
    general_function_limit,
    image_filter,
    is_filter,
    principal_filter,
)
from .genfun import Ball, Box, FunctionalElement, PointSet, direct_prolongation
from .geometry import exterior_derivative, hamilton_jacobi_residual, pairing, skew_field

TASKS = ("derive", "solve-e", "solve-p", "solve-f", "verify", "pairing",
         "hj", "prolong", "filter", "ball-limit")

DEFAULT_TOL = 1e-9
DEFAULT_STEP = 1e-3
_SPOT_SEED = 1729
_SPOT_POINTS = 32


class InputError(Exception):
    """Problem-file error with a field-level message."""


def _fail(message):
    raise InputError(message)


def _require(problem, key):
    if key not in problem:
        _fail(f"task {problem.get('task')!r} requires field {key!r}")
    return problem[key]


def _expr(problem, key, default=None):
    if key not in problem:
        if default is not None:
            return default
        _fail(f"task {problem.get('task')!r} requires expression field {key!r}")
    text = problem[key]
    try:
        return ex.parse(str(text))
    except FieldPathError as err:
        _fail(f"field {key!r}: {err}")


def _number(problem, key, default=None):
    if key not in problem:
        if default is None:
            _fail(f"task {problem.get('task')!r} requires numeric field {key!r}")
        return default
    try:
        return float(problem[key])
    except (TypeError, ValueError):
        _fail(f"field {key!r} must be a number, got {problem[key]!r}")


def _dimension(problem):
    dim = _require(problem, "dimension")
    if not isinstance(dim, int) or dim < 2:
        _fail("field 'dimension' must be an integer of at least 2")
    return dim


def _field(problem, dim):
    body = _expr(problem, "E")
    try:
        return ScalarField(dim, body)
    except FieldPathError as err:
        _fail(f"field 'E': {err}")


def _curve(problem, dim):
    texts = _require(problem, "curve")
    if not isinstance(texts, list) or len(texts) != dim - 1:
        _fail(f"field 'curve' must list {dim - 1} component expressions")
    smooth = problem.get("smoothness", "C2")
    try:
        return Curve.from_text([str(s) for s in texts], smoothness=smooth)
    except (FieldPathError, ValueError) as err:
        _fail(f"field 'curve': {err}")


def _skew(problem, dim):
    rows = _require(problem, "b")
    order = dim - 1
    if rows and all(isinstance(v, (int, float)) for v in rows):
        if len(rows) != order * order:
            _fail(f"flat field 'b' must hold {order * order} entries")
        rows = [rows[i * order:(i + 1) * order] for i in range(order)]
    try:
        return SkewMatrix(tuple(tuple(row) for row in rows))
    except (FieldPathError, ValueError) as err:
        _fail(f"field 'b': {err}")


def _x0(problem, dim):
    values = _require(problem, "x0")
    if not isinstance(values, list) or len(values) != dim - 1:
        _fail(f"field 'x0' must list {dim - 1} numbers")
    return tuple(float(v) for v in values)


def _region(raw, what):
    if not isinstance(raw, dict) or "type" not in raw:
        _fail(f"{what} must be an object with a 'type'")
    try:
        match raw["type"]:
            case "box":
                return Box(tuple(raw["lower"]), tuple(raw["upper"]))
            case "ball":
                return Ball(tuple(raw["center"]), float(raw["radius"]))
            case "points":
                return PointSet(tuple(map(tuple, raw["points"])))
    except (KeyError, TypeError, ValueError, FieldPathError) as err:
        _fail(f"{what}: {err}")
    _fail(f"{what}: unknown region type {raw['type']!r}")


def _verdict(name, residual, tolerance):
    return {"name": name, "residual": float(residual),
            "tolerance": float(tolerance), "pass": bool(residual <= tolerance)}


def _spot_times(t0, t1, count=16):
    return [t0 + (t1 - t0) * k / (count - 1) for k in range(count)]


def _max_abs_at_random_points(e, names, tol_ignored=None):
    rng = np.random.default_rng(_SPOT_SEED)
    worst = 0.0
    for _ in range(_SPOT_POINTS):
        a = {n: float(v) for n, v in zip(names, rng.uniform(-2, 2, len(names)))}
        worst = max(worst, abs(ex.evaluate(e, a)))
    return worst


def _composition_series(field, curve, path, t0, t1, step):
    n = max(1, round((t1 - t0) / step))
    h = (t1 - t0) / n
    names = spatial_names(field.dimension)
    rows = []
    for k in range(n + 1):
        t = t0 + k * h
        point = curve.point(t)
        a = dict(zip(names, point))
        a["t"] = t
        on_curve = ex.evaluate(field.body, a)
        f_val = path.value(t)
        rows.append([t, *point, f_val, on_curve, f_val - on_curve])
    return rows


def _series_columns(dim):
    return ["t"] + list(spatial_names(dim)) + ["f", "E_on_curve", "residual"]


# ---------------------------------------------------------------------------
# Task handlers; each returns (outputs, verdicts, diagnostics, series)

def _run_derive(problem, tol, step):
    dim = _dimension(problem)
    field = _field(problem, dim)
    curve = _curve(problem, dim)
    t0 = _number(problem, "t0", 0.0)
    t1 = _number(problem, "t1", 1.0)
    total = total_derivative_expression(field, curve)
    advective = advective_term_expression(field, curve)
    on_curve_dt = ex.simplify(ex.substitute(
        time_partial(field), dict(zip(spatial_names(dim), curve.components))))
    worst = 0.0
    for t in _spot_times(t0, t1):
        lhs = ex.evaluate(total, {"t": t})
        rhs = ex.evaluate(advective, {"t": t}) + ex.evaluate(on_curve_dt, {"t": t})
        worst = max(worst, abs(lhs - rhs))
    outputs = {
        "total_derivative": ex.to_string(total),
        "advective_term": ex.to_string(advective),
        "time_partial_on_curve": ex.to_string(on_curve_dt),
    }
    verdicts = [_verdict("decomposition", worst, tol)]
    return outputs, verdicts, {"t_span": [t0, t1]}, None


def _run_solve_e(problem, tol, step):
    dim = _dimension(problem)
    field = _field(problem, dim)
    b = _skew(problem, dim)
    x0 = _x0(problem, dim)
    t0 = _number(problem, "t0")
    t1 = _number(problem, "t1")
    cfg = ToleranceConfig(ode_step=step, eq_tol=tol)
    sol = solve_e_case(field, b, x0, t0, t1, cfg)
    d = sol.diagnostics
    names = spatial_names(dim)
    rows = []
    for t, point, (_, f_val) in zip(sol.curve.times, sol.curve.points,
                                    sol.path.samples):
        on_curve = ex.evaluate(field.body, dict(zip(names, point), t=t))
        rows.append([t, *point, f_val, on_curve, f_val - on_curve])
    outputs = {"samples": len(sol.curve.times)}
    verdicts = [_verdict("composition", d.max_composition_residual, tol)]
    diagnostics = {
        "max_composition_residual": d.max_composition_residual,
        "max_defining_residual": d.max_defining_residual,
        "t_span": list(d.t_span), "step": d.step,
    }
    return outputs, verdicts, diagnostics, (_series_columns(dim), rows)


def _run_solve_p(problem, tol, step):
    dim = _dimension(problem)
    curve = _curve(problem, dim)
    b = _skew(problem, dim)
    t_expr = _expr(problem, "T", ex.Num(0.0))
    t0 = _number(problem, "t0", 0.0)
    t1 = _number(problem, "t1", 1.0)
    cfg = ToleranceConfig(ode_step=step, eq_tol=tol)
    sol = solve_p_case(curve, b, t_expr, cfg, t0=t0, t1=t1)
    d = sol.diagnostics
    outputs = {"E": ex.to_string(sol.field.body),
               "f": ex.to_string(sol.path.body)}
    verdicts = [_verdict("defining", d.max_defining_residual, tol),
                _verdict("composition", d.max_composition_residual, tol)]
    diagnostics = {"t_span": list(d.t_span)}
    series = (_series_columns(dim),
              _composition_series(sol.field, curve, sol.path, t0, t1, step))
    return outputs, verdicts, diagnostics, series


def _run_solve_f(problem, tol, step):
    dim = _dimension(problem)
    f = PathFunction(body=_expr(problem, "f"))
    x0 = _x0(problem, dim)
    g = _expr(problem, "G") if "G" in problem else None
    t0 = _number(problem, "t0", 0.0)
    t1 = _number(problem, "t1", 1.0)
    try:
        sol = solve_f_case(f, dim, x0, G=g, t0=t0, t1=t1)
    except ValueError as err:
        _fail(str(err))
    d = sol.diagnostics
    outputs = {
        "E": ex.to_string(sol.field.body),
        "H": ex.to_string(sol.characteristics.rate.body),
        "curve": [ex.to_string(c) for c in sol.curve.components],
        "invariants": [ex.to_string(i)
                       for i in sol.characteristics.invariants],
    }
    verdicts = [_verdict("pde-residual", d.max_defining_residual, tol),
                _verdict("composition", d.max_composition_residual, tol)]
    series = (_series_columns(dim),
              _composition_series(sol.field, sol.curve, sol.path, t0, t1, step))
    return outputs, verdicts, {"t_span": list(d.t_span)}, series


def _run_verify(problem, tol, step):
    dim = _dimension(problem)
    field = _field(problem, dim)
    curve = _curve(problem, dim)
    path = PathFunction(body=_expr(problem, "f"))
    t0 = _number(problem, "t0", 0.0)
    t1 = _number(problem, "t1", 1.0)
    sol = CaseSolution(field, curve, path,
                       CaseDiagnostics(0.0, 0.0, (t0, t1), step))
    report = verify_composition(sol, 16)
    outputs = {"samples": report.sample_count}
    verdicts = [
        _verdict("composition", report.max_composition_residual, tol),
        _verdict("derivative", report.max_derivative_residual, tol),
    ]
    series = (_series_columns(dim),
              _composition_series(field, curve, path, t0, t1, step))
    return outputs, verdicts, {"t_span": [t0, t1]}, series


def _run_pairing(problem, tol, step):
    dim = _dimension(problem)
    field = _field(problem, dim)
    b = _skew(problem, dim)
    paired = pairing(exterior_derivative(field), skew_field(field, b))
    dt_body = time_partial(field)
    names = spatial_names(dim) + ("t",)
    worst = _max_abs_at_random_points(
        ex.simplify(paired - dt_body), names)
    outputs = {"pairing": ex.to_string(paired),
               "time_partial": ex.to_string(dt_body)}
    verdicts = [_verdict("pairing-identity", worst, tol)]
    return outputs, verdicts, {"points": _SPOT_POINTS}, None


def _run_hj(problem, tol, step):
    s = _expr(problem, "S")
    h = _expr(problem, "H")
    raw_constants = problem.get("constants", {})
    if not isinstance(raw_constants, dict):
        _fail("field 'constants' must map names to numbers")
    try:
        constants = {str(k): float(v) for k, v in raw_constants.items()}
    except (TypeError, ValueError):
        _fail("field 'constants' must map names to numbers")
    residual = hamilton_jacobi_residual(s, h, constants=constants)
    names = tuple(sorted(ex.free_variables(residual)))
    worst = (_max_abs_at_random_points(residual, names)
             if names else abs(ex.evaluate(residual, {})))
    outputs = {"residual": ex.to_string(residual)}
    verdicts = [_verdict("hj-residual", worst, tol)]
    return outputs, verdicts, {"points": _SPOT_POINTS}, None


def _run_prolong(problem, tol, step):
    raw = _require(problem, "elements")
    if not isinstance(raw, list) or len(raw) != 2:
        _fail("field 'elements' must list exactly two element objects")
    elements = []
    for idx, item in enumerate(raw):
        if not isinstance(item, dict):
            _fail(f"element {idx} must be an object")
        region = _region(item.get("region"), f"element {idx} region")
        if "expr" not in item:
            _fail(f"element {idx} requires field 'expr'")
        try:
            body = ex.parse(str(item["expr"]))
        except FieldPathError as err:
            _fail(f"element {idx} expr: {err}")
        try:
            elements.append(FunctionalElement(
                region, ScalarField(region.dimension + 1, body)))
        except FieldPathError as err:
            _fail(f"element {idx}: {err}")
    result = direct_prolongation(elements[0], elements[1], tol)
    outputs = {"sample_count": result.sample_count, "agree": result.agree}
    verdicts = [_verdict("prolongation", result.max_deviation,
                         tol if result.sample_count else -1.0)]
    return outputs, verdicts, {"samples": result.sample_count}, None


def _labels(problem, key):
    values = _require(problem, key)
    if not isinstance(values, list) or not values:
        _fail(f"field {key!r} must be a nonempty list of labels")
    return [str(v) for v in values]


def _run_filter(problem, tol, step):
    d = FiniteSpace(frozenset(_labels(problem, "D")))
    k = FiniteSpace(frozenset(_labels(problem, "K")))
    raw_blocks = _require(problem, "blocks")
    if not isinstance(raw_blocks, list):
        _fail("field 'blocks' must be a list of label lists")
    try:
        part = Partition(d, tuple(frozenset(str(x) for x in blk)
                                  for blk in raw_blocks))
    except FieldPathError as err:
        _fail(f"field 'blocks': {err}")
    raw_map = _require(problem, "map")
    if not isinstance(raw_map, dict):
        _fail("field 'map' must be an object from D labels to K labels")
    total = {str(key): str(value) for key, value in raw_map.items()}
    try:
        m = ElementMap(part, k, tuple({x: total[x] for x in blk if x in total}
                                      for blk in part.blocks))
    except FieldPathError as err:
        _fail(f"field 'map': {err}")
    index = _require(problem, "block")
    if not isinstance(index, int) or not 0 <= index < len(part.blocks):
        _fail(f"field 'block' must be a block index in 0..{len(part.blocks) - 1}")
    a = frozenset(_labels(problem, "A"))

    bad_blocks = sum(
        not is_filter(principal_filter(d, blk), d).ok for blk in part.blocks)
    image = image_filter(m, index, principal_filter(d, part.blocks[index]), k)
    image_bad = 0 if is_filter(image, k).ok else 1
    try:
        limit_holds = general_function_limit(m, index, a)
    except FieldPathError as err:
        _fail(f"field 'A': {err}")

    outputs = {
        "block_count": len(part.blocks),
        "image": sorted(image.generator),
    }
    verdicts = [
        _verdict("blocks-are-filters", float(bad_blocks), 0.0),
        _verdict("image-is-filter", float(image_bad), 0.0),
        _verdict("limit", 0.0 if limit_holds else 1.0, 0.0),
    ]
    return outputs, verdicts, {"carrier": d.size, "codomain": k.size}, None


def _run_ball_limit(problem, tol, step):
    dim = _dimension(problem)
    field = _field(problem, dim)
    curve = _curve(problem, dim)
    t = _number(problem, "t0", 0.0)
    result = ball_filter_limit(field, curve, t)
    want = total_derivative(field, curve, t)
    outputs = {
        "limit": result.limit,
        "center_value": result.center_value,
        "total_derivative": want,
        "deviations": list(result.deviations),
    }
    verdicts = [_verdict("limit-agreement", abs(result.limit - want), tol)]
    return outputs, verdicts, {"radii": list(result.radii)}, None


_HANDLERS = {
    "derive": _run_derive,
    "solve-e": _run_solve_e,
    "solve-p": _run_solve_p,
    "solve-f": _run_solve_f,
    "verify": _run_verify,
    "pairing": _run_pairing,
    "hj": _run_hj,
    "prolong": _run_prolong,
    "filter": _run_filter,
    "ball-limit": _run_ball_limit,
}


def run_problem(problem, tol_override=None, step_override=None):
    """Dispatch a parsed problem dict; returns the report dict."""
    if not isinstance(problem, dict):
        _fail("the problem file must hold a JSON object")
    task = problem.get("task")
    if task not in TASKS:
        _fail(f"field 'task' must be one of {', '.join(TASKS)}; got {task!r}")
    tol = tol_override if tol_override is not None else \
        _number(problem, "tol", DEFAULT_TOL)
    step = step_override if step_override is not None else \
        _number(problem, "step", DEFAULT_STEP)
    if tol <= 0 or step <= 0:
        _fail("tol and step must be strictly positive")
    outputs, verdicts, diagnostics, series = _HANDLERS[task](problem, tol, step)
    report = {
        "task": task,
        "outputs": outputs,
        "verdicts": verdicts,
        "diagnostics": diagnostics,
        "passed": all(v["pass"] for v in verdicts),
    }
    if series is not None:
        columns, rows = series
        report["series_columns"] = columns
        report["series"] = rows
    return report


def emit_series(report, path):
    """Write the report's numeric series as delimiter-separated text with a
    header row; header-only when the task produced no series."""
    columns = report.get("series_columns", ["t"])
    rows = report.get("series", [])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _print_report(report):
    print(f"task: {report['task']}")
    for key, value in report["outputs"].items():
        print(f"  {key}: {value}")
    for v in report["verdicts"]:
        state = "PASS" if v["pass"] else "FAIL"
        print(f"  [{state}] {v['name']}: residual {v['residual']:.6g} "
              f"(tolerance {v['tolerance']:.6g})")
    print(f"result: {'pass' if report['passed'] else 'FAIL'}")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--list-tasks" in argv or argv[:1] == ["list-tasks"]:
        for task in TASKS:
            print(task)
        return 0

    parser = argparse.ArgumentParser(
        prog="fieldpath",
        description="Field/curve/composition calculus problem runner")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a JSON problem file")
    runp.add_argument("file")
    runp.add_argument("--out", help="write a machine-readable JSON report")
    runp.add_argument("--series", help="write the numeric series as CSV")
    runp.add_argument("--tol", type=float, help="override the tolerance")
    runp.add_argument("--step", type=float, help="override the grid step")
    sub.add_parser("list-tasks", help="list the available tasks")
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # Usage problems are input errors; keep 2 reserved for verdict
        # failures.
        code = err.code if isinstance(err.code, int) else 1
        return 0 if code == 0 else 1

    if args.command == "list-tasks":
        for task in TASKS:
            print(task)
        return 0

    try:
        with open(args.file, encoding="utf-8") as fh:
            problem = json.load(fh)
    except OSError as err:
        print(f"error: cannot read {args.file}: {err}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as err:
        print(f"error: {args.file} is not valid JSON: {err}", file=sys.stderr)
        return 1

    try:
        report = run_problem(problem, args.tol, args.step)
    except (InputError, FieldPathError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    _print_report(report)
    if args.out:
        payload = json.dumps(report, indent=2, sort_keys=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    if args.series:
        emit_series(report, args.series)
    return 0 if report["passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
