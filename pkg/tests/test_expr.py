"""Parser, evaluator, symbolic derivative, and simplifier checks."""

import math

import numpy as np
import pytest

from fieldpath.errors import DomainError, ParseError, UnboundVariableError
from fieldpath.expr import (
    BinOp,
    Call,
    Num,
    Var,
    differentiate,
    equivalent,
    evaluate,
    free_variables,
    parse,
    simplify,
    substitute,
    to_string,
)

CORPUS = [
    "x1^2 + sin(t)",
    "2*x1*x2 - t/3",
    "sin(x1*x2)",
    "exp(x1)*cos(t)",
    "log(1 + x1^2)",
    "sqrt(1 + x1^2 + x2^2)",
    "-x1^2",
    "(x1 + t)^3",
    "x1/(2 + x2^2)",
    "1/(1 + exp(-x1))",
    "cos(x1)^2 + sin(x1)^2",
    "x1^-2",
    "2^t",
    "-(x1 - t)*x2",
]


def central_fd(e, name, assignment, h_scale=1e-6):
    h = h_scale * max(1.0, abs(assignment[name]))
    hi = dict(assignment, **{name: assignment[name] + h})
    lo = dict(assignment, **{name: assignment[name] - h})
    return (evaluate(e, hi) - evaluate(e, lo)) / (2 * h)


def test_parse_structure():
    assert parse("x1^2 + sin(t)") == BinOp(
        "+", BinOp("^", Var("x1"), Num(2.0)), Call("sin", Var("t")))
    assert parse("0") == Num(0.0)


def test_parse_hand_evaluation():
    e = parse("2*x1*x2 - t/3")
    # 2*1*2 - 3/3 = 3
    assert evaluate(e, {"x1": 1, "x2": 2, "t": 3}) == pytest.approx(3.0)


@pytest.mark.parametrize("text,expected", [
    ("2+3*4", 14.0),
    ("2*3^2", 18.0),
    ("-2^2", -4.0),          # ^ binds tighter than unary minus
    ("2^3^2", 512.0),        # right associative
    ("(2+3)*4", 20.0),
    ("8-3-2", 3.0),
    ("8/4/2", 1.0),
    ("2^-1", 0.5),
    ("--3", 3.0),
])
def test_precedence_and_associativity(text, expected):
    assert evaluate(parse(text), {}) == pytest.approx(expected)


def test_parse_error_offsets():
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError) as info:
        parse("x1 $ 2")
    assert info.value.offset == 3
    with pytest.raises(ParseError) as info:
        parse("x1 +")
    assert info.value.offset == 4
    with pytest.raises(ParseError) as info:
        parse("2*(x1")
    assert info.value.expected == "')'"
    with pytest.raises(ParseError):
        parse("foo(2)")
    with pytest.raises(ParseError) as info:
        parse("x1 x2")
    assert info.value.offset == 3


def test_evaluate_basics():
    assert evaluate(parse("t"), {"t": 5}) == 5.0
    assert evaluate(parse("x1^2 + x2^2"), {"x1": 3, "x2": 4}) == 25.0


def test_evaluate_errors():
    with pytest.raises(DomainError):
        evaluate(parse("log(x1)"), {"x1": -1})
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(x1)"), {"x1": -4})
    with pytest.raises(DomainError):
        evaluate(parse("1/x1"), {"x1": 0})
    with pytest.raises(DomainError):
        evaluate(parse("0^x1"), {"x1": -1})
    with pytest.raises(UnboundVariableError):
        evaluate(parse("x1 + x2"), {"x1": 1})
    with pytest.raises(DomainError):
        evaluate(parse("exp(x1)"), {"x1": 1e6})


def test_differentiate_trivial():
    assert to_string(simplify(differentiate(parse("x1^2"), "x1"))) == "2*x1"
    assert simplify(differentiate(parse("x1"), "t")) == Num(0.0)


def test_differentiate_matches_finite_difference_spot():
    e = parse("sin(x1*x2)")
    d = differentiate(e, "x1")
    point = {"x1": 0.7, "x2": 1.3}
    assert evaluate(d, point) == pytest.approx(
        central_fd(e, "x1", point), abs=1e-7)


def test_differentiate_matches_finite_difference_corpus():
    rng = np.random.default_rng(7)
    for text in CORPUS:
        e = parse(text)
        for name in sorted(free_variables(e)):
            d = differentiate(e, name)
            checked = 0
            while checked < 5:
                point = {n: float(v) for n, v in
                         zip(sorted(free_variables(e)),
                             rng.uniform(-2, 2, len(free_variables(e))))}
                try:
                    got = evaluate(d, point)
                    want = central_fd(e, name, point)
                except DomainError:
                    continue
                assert got == pytest.approx(want, rel=1e-6, abs=1e-6), \
                    f"{text} d/d{name} at {point}"
                checked += 1


def test_simplify_rules():
    assert simplify(parse("x1*0 + t")) == Var("t")
    assert simplify(parse("2+3")) == Num(5.0)
    assert simplify(parse("x1 - x1")) == Num(0.0)
    assert simplify(parse("x1^1 * 1")) == Var("x1")
    assert simplify(parse("t + 0")) == Var("t")


def test_simplify_keeps_undefined_constants_unfolded():
    e = parse("1/0")
    assert simplify(e) == e
    with pytest.raises(DomainError):
        evaluate(simplify(e), {})


def test_simplified_derivative_equivalent():
    d = simplify(differentiate(parse("x1*x2"), "x1"))
    assert equivalent(d, parse("x2"), tol=1e-12)


def test_simplify_preserves_value():
    rng = np.random.default_rng(11)
    for text in CORPUS:
        e = parse(text)
        s = simplify(e)
        names = sorted(free_variables(e))
        for _ in range(32):
            point = {n: float(v) for n, v in
                     zip(names, rng.uniform(-2, 2, len(names)))}
            try:
                want = evaluate(e, point)
            except DomainError:
                continue
            assert abs(evaluate(s, point) - want) <= 1e-12 * max(1, abs(want))


def test_print_parse_round_trip():
    for text in CORPUS:
        e = parse(text)
        assert equivalent(parse(to_string(e)), e, tol=1e-12)
        d = differentiate(e, sorted(free_variables(e))[0])
        assert equivalent(parse(to_string(d)), d, tol=1e-12)
        s = simplify(d)
        assert equivalent(parse(to_string(s)), s, tol=1e-12)


def test_substitute():
    e = parse("x1^2 + t")
    out = substitute(e, {"x1": parse("cos(t)")})
    assert free_variables(out) == frozenset({"t"})
    assert evaluate(out, {"t": 0.3}) == pytest.approx(math.cos(0.3) ** 2 + 0.3)


def test_operator_overloads_build_trees():
    x = Var("x1")
    e = x ** 2 + 3 * x - 1
    assert evaluate(e, {"x1": 2.0}) == pytest.approx(9.0)
    assert evaluate(-x / 2, {"x1": 3.0}) == pytest.approx(-1.5)
