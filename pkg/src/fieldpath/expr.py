"""Arithmetic expression trees: parsing, evaluation, symbolic differentiation,
and light simplification.

Grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*        left associative
    term   := unary (('*'|'/') unary)*      left associative
    unary  := '-' unary | power
    power  := atom ('^' unary)?             right associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  The only
recognized functions are sin, cos, exp, log, sqrt, and neg.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError, UnboundVariableError

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Call",
    "BinOp",
    "FUNCTIONS",
    "parse",
    "evaluate",
    "differentiate",
    "simplify",
    "substitute",
    "free_variables",
    "to_string",
    "equivalent",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "neg")


@dataclass(frozen=True)
class Expression:
    """Base node.  Subclasses are immutable; operators build new trees."""

    def __add__(self, other):
        return BinOp("+", self, _coerce(other))

    def __radd__(self, other):
        return BinOp("+", _coerce(other), self)

    def __sub__(self, other):
        return BinOp("-", self, _coerce(other))

    def __rsub__(self, other):
        return BinOp("-", _coerce(other), self)

    def __mul__(self, other):
        return BinOp("*", self, _coerce(other))

    def __rmul__(self, other):
        return BinOp("*", _coerce(other), self)

    def __truediv__(self, other):
        return BinOp("/", self, _coerce(other))

    def __rtruediv__(self, other):
        return BinOp("/", _coerce(other), self)

    def __pow__(self, other):
        return BinOp("^", self, _coerce(other))

    def __neg__(self):
        return Call("neg", self)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Num(Expression):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Var(Expression):
    name: str


@dataclass(frozen=True)
class Call(Expression):
    func: str
    arg: Expression


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression


def _coerce(value):
    if isinstance(value, Expression):
        return value
    return Num(value)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<NUMBER>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OP>[-+*/^()])
  | (?P<SKIP>\s+)
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             "number, name, operator, or parenthesis")
        if m.lastgroup != "SKIP":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("END", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, off = self.peek()
        if kind != "OP" or text != op:
            raise ParseError(f"found {text!r}" if text else "input ended", off,
                             repr(op))
        return self.advance()

    def parse_expr(self):
        node = self.parse_term()
        while self.peek()[:2] in (("OP", "+"), ("OP", "-")):
            op = self.advance()[1]
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self):
        node = self.parse_unary()
        while self.peek()[:2] in (("OP", "*"), ("OP", "/")):
            op = self.advance()[1]
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self):
        if self.peek()[:2] == ("OP", "-"):
            self.advance()
            return Call("neg", self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        if self.peek()[:2] == ("OP", "^"):
            self.advance()
            # right associative; the exponent may carry a unary minus
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_atom(self):
        kind, text, off = self.advance()
        if kind == "NUMBER":
            value = float(text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {text!r} overflows", off,
                                 "a finite number")
            return Num(value)
        if kind == "NAME":
            if self.peek()[:2] == ("OP", "("):
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", off,
                                     "one of " + ", ".join(FUNCTIONS))
                self.advance()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(text, arg)
            return Var(text)
        if kind == "OP" and text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError(f"found {text!r}" if text else "input ended", off,
                         "a number, variable, function, or '('")


def parse(text: str) -> Expression:
    """Parse an expression string into a tree.

    Raises :class:`ParseError` with the byte offset of the first bad token.
    """
    if not text or not text.strip():
        raise ParseError("empty input", 0, "an expression")
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    kind, trailing, off = parser.peek()
    if kind != "END":
        raise ParseError(f"trailing input {trailing!r}", off, "end of input")
    return node


# ---------------------------------------------------------------------------
# Evaluation

def _finite(value, what):
    if not math.isfinite(value):
        raise DomainError(f"{what} is not finite")
    return value


def evaluate(e: Expression, assignment) -> float:
    """Evaluate ``e`` at a full assignment of its free variables.

    Returns a finite float or raises :class:`DomainError` /
    :class:`UnboundVariableError`; never returns NaN or infinity.
    """
    match e:
        case Num(value=v):
            return v
        case Var(name=name):
            try:
                return _finite(float(assignment[name]), f"value of {name!r}")
            except KeyError:
                raise UnboundVariableError(name) from None
        case Call(func=func, arg=arg):
            v = evaluate(arg, assignment)
            if func == "sin":
                return math.sin(v)
            if func == "cos":
                return math.cos(v)
            if func == "exp":
                try:
                    return _finite(math.exp(v), "exp")
                except OverflowError:
                    raise DomainError("exp overflow") from None
            if func == "log":
                if v <= 0.0:
                    raise DomainError(f"log of non-positive value {v}")
                return math.log(v)
            if func == "sqrt":
                if v < 0.0:
                    raise DomainError(f"sqrt of negative value {v}")
                return math.sqrt(v)
            if func == "neg":
                return -v
            raise DomainError(f"unknown function {func!r}")
        case BinOp(op=op, left=left, right=right):
            a = evaluate(left, assignment)
            b = evaluate(right, assignment)
            if op == "+":
                return _finite(a + b, "sum")
            if op == "-":
                return _finite(a - b, "difference")
            if op == "*":
                return _finite(a * b, "product")
            if op == "/":
                if b == 0.0:
                    raise DomainError("division by zero")
                return _finite(a / b, "quotient")
            if op == "^":
                return _power(a, b)
            raise DomainError(f"unknown operator {op!r}")
    raise TypeError(f"not an expression node: {e!r}")


def _power(a, b):
    if a == 0.0:
        if b < 0.0:
            raise DomainError("0 raised to a negative power")
        return 0.0 if b > 0.0 else 1.0
    if a < 0.0 and b != math.floor(b):
        raise DomainError(f"negative base {a} with non-integer exponent {b}")
    try:
        return _finite(math.pow(a, b), "power")
    except OverflowError:
        raise DomainError("power overflow") from None
    except ValueError:
        raise DomainError(f"power {a}^{b} undefined") from None


# ---------------------------------------------------------------------------
# Differentiation

def differentiate(e: Expression, var) -> Expression:
    """Exact symbolic derivative of ``e`` with respect to ``var``.

    The result is not simplified; pass it through :func:`simplify` for a
    tidy form.  Points where the derivative is undefined surface later as
    evaluation domain errors.
    """
    name = var.name if isinstance(var, Var) else var
    return _diff(e, name)


def _diff(e, name):
    match e:
        case Num():
            return Num(0.0)
        case Var(name=n):
            return Num(1.0 if n == name else 0.0)
        case Call(func="sin", arg=u):
            return BinOp("*", Call("cos", u), _diff(u, name))
        case Call(func="cos", arg=u):
            return BinOp("*", Call("neg", Call("sin", u)), _diff(u, name))
        case Call(func="exp", arg=u):
            return BinOp("*", Call("exp", u), _diff(u, name))
        case Call(func="log", arg=u):
            return BinOp("/", _diff(u, name), u)
        case Call(func="sqrt", arg=u):
            return BinOp("/", _diff(u, name),
                         BinOp("*", Num(2.0), Call("sqrt", u)))
        case Call(func="neg", arg=u):
            return Call("neg", _diff(u, name))
        case BinOp(op="+", left=a, right=b):
            return BinOp("+", _diff(a, name), _diff(b, name))
        case BinOp(op="-", left=a, right=b):
            return BinOp("-", _diff(a, name), _diff(b, name))
        case BinOp(op="*", left=a, right=b):
            return BinOp("+", BinOp("*", _diff(a, name), b),
                         BinOp("*", a, _diff(b, name)))
        case BinOp(op="/", left=a, right=b):
            num = BinOp("-", BinOp("*", _diff(a, name), b),
                        BinOp("*", a, _diff(b, name)))
            return BinOp("/", num, BinOp("^", b, Num(2.0)))
        case BinOp(op="^", left=u, right=v):
            c = _constant_value(v)
            if c is not None:
                # power rule; keeps negative bases in the real domain
                return BinOp("*",
                             BinOp("*", Num(c), BinOp("^", u, Num(c - 1.0))),
                             _diff(u, name))
            # u^v = exp(v*log(u)); valid where u > 0
            inner = BinOp("+", BinOp("*", _diff(v, name), Call("log", u)),
                          BinOp("/", BinOp("*", v, _diff(u, name)), u))
            return BinOp("*", BinOp("^", u, v), inner)
    raise TypeError(f"not an expression node: {e!r}")


def _constant_value(e):
    if free_variables(e):
        return None
    try:
        return evaluate(e, {})
    except DomainError:
        return None


# ---------------------------------------------------------------------------
# Simplification

_ZERO = Num(0.0)
_ONE = Num(1.0)
_NEG_ONE = Num(-1.0)


def simplify(e: Expression) -> Expression:
    """Constant folding plus x+0, x*1, x*0, x-x, x^1 rewrites to fixpoint.

    Never changes the value where the input is defined.
    """
    for _ in range(100):
        new = _simplify_once(e)
        if new == e:
            return e
        e = new
    return e


def _simplify_once(e):
    match e:
        case Num() | Var():
            return e
        case Call(func=func, arg=arg):
            arg = _simplify_once(arg)
            if func == "neg":
                if isinstance(arg, Num):
                    return Num(-arg.value)
                if isinstance(arg, Call) and arg.func == "neg":
                    return arg.arg
            elif isinstance(arg, Num):
                folded = _try_fold(Call(func, arg))
                if folded is not None:
                    return folded
            return Call(func, arg)
        case BinOp(op=op, left=left, right=right):
            left = _simplify_once(left)
            right = _simplify_once(right)
            node = BinOp(op, left, right)
            if isinstance(left, Num) and isinstance(right, Num):
                folded = _try_fold(node)
                if folded is not None:
                    return folded
            if op == "+":
                if left == _ZERO:
                    return right
                if right == _ZERO:
                    return left
            elif op == "-":
                if right == _ZERO:
                    return left
                if left == right:
                    return Num(0.0)
            elif op == "*":
                if left == _ZERO or right == _ZERO:
                    return Num(0.0)
                if left == _ONE:
                    return right
                if right == _ONE:
                    return left
                if left == _NEG_ONE:
                    return Call("neg", right)
                if right == _NEG_ONE:
                    return Call("neg", left)
            elif op == "/":
                if right == _ONE:
                    return left
            elif op == "^":
                if right == _ONE:
                    return left
            return node
    raise TypeError(f"not an expression node: {e!r}")


def _try_fold(e):
    # fold only when evaluation succeeds; leave e.g. 1/0 unfolded
    try:
        return Num(evaluate(e, {}))
    except (DomainError, UnboundVariableError):
        return None


# ---------------------------------------------------------------------------
# Structure utilities

def substitute(e: Expression, mapping) -> Expression:
    """Replace variables by expressions; ``mapping`` maps name -> Expression."""
    match e:
        case Num():
            return e
        case Var(name=name):
            return mapping.get(name, e)
        case Call(func=func, arg=arg):
            return Call(func, substitute(arg, mapping))
        case BinOp(op=op, left=left, right=right):
            return BinOp(op, substitute(left, mapping),
                         substitute(right, mapping))
    raise TypeError(f"not an expression node: {e!r}")


def free_variables(e: Expression) -> frozenset:
    match e:
        case Num():
            return frozenset()
        case Var(name=name):
            return frozenset((name,))
        case Call(arg=arg):
            return free_variables(arg)
        case BinOp(left=left, right=right):
            return free_variables(left) | free_variables(right)
    raise TypeError(f"not an expression node: {e!r}")


# printer precedence levels: + - = 1, * / = 2, unary minus = 3, ^ = 4, atom = 5
def _prec(e):
    match e:
        case Num(value=v):
            return 3 if v < 0 else 5
        case Var():
            return 5
        case Call(func="neg"):
            return 3
        case Call():
            return 5
        case BinOp(op=op):
            return 1 if op in "+-" else (2 if op in "*/" else 4)
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e, minimum):
    text = to_string(e)
    return f"({text})" if _prec(e) < minimum else text


def to_string(e: Expression) -> str:
    """Print in the grammar's syntax; ``parse(to_string(e))`` is
    evaluation-equivalent to ``e``."""
    match e:
        case Num(value=v):
            if v == int(v) and abs(v) <= 1e15:
                return str(int(v))
            return repr(v)
        case Var(name=name):
            return name
        case Call(func="neg", arg=arg):
            return "-" + _wrap(arg, 3)
        case Call(func=func, arg=arg):
            return f"{func}({to_string(arg)})"
        case BinOp(op=op, left=left, right=right):
            if op in "+-":
                return f"{_wrap(left, 1)} {op} {_wrap(right, 2)}"
            if op in "*/":
                return f"{_wrap(left, 2)}{op}{_wrap(right, 3)}"
            # '^' is right associative and binds tighter than unary minus
            return f"{_wrap(left, 5)}^{_wrap(right, 3)}"
    raise TypeError(f"not an expression node: {e!r}")


def equivalent(e1: Expression, e2: Expression, *, points: int = 32,
               tol: float = 1e-9, seed: int = 1729, low: float = -2.0,
               high: float = 2.0) -> bool:
    """Randomized-evaluation equality on shared free variables.

    Samples uniform assignments in ``[low, high]`` for every free variable of
    either expression; points where either side is undefined are skipped.
    Equal when ``|v1 - v2| <= tol * max(1, |v1|, |v2|)`` at every defined
    sample point (and at least one point was defined).
    """
    names = sorted(free_variables(e1) | free_variables(e2))
    rng = np.random.default_rng(seed)
    checked = 0
    attempts = 0
    while checked < points and attempts < 20 * points:
        attempts += 1
        a = {n: float(v) for n, v in zip(names, rng.uniform(low, high, len(names)))}
        try:
            v1 = evaluate(e1, a)
            v2 = evaluate(e2, a)
        except DomainError:
            continue
        if abs(v1 - v2) > tol * max(1.0, abs(v1), abs(v2)):
            return False
        checked += 1
    return checked > 0
