"""Per-agent scaling functions g(x, t) with exact partial derivatives.

Scales are closed expressions over the state x and time t, drawn from a
small family: constants, x, t, sums, products, sine, cosine, and
reciprocals (the last gives rational forms such as x / (1 + 0.1*x^2)).
Partial derivatives are produced by symbolic differentiation of the
expression tree, then compiled to plain Python for fast evaluation. The
closed loop divides by dg/dx, so derivative noise feeds straight into
the control signal; exact derivatives avoid that entirely.

Four built-in six-agent settings (C1..C4) cover constant, multiplicative
time-varying, and nonlinear scaling combinations. Arbitrary scales can
be written in a small infix grammar, see :func:`parse_scale`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Mul",
    "Sin",
    "Cos",
    "Recip",
    "ScaleFunction",
    "ScaleDerivativeError",
    "ScaleParseError",
    "diff",
    "simplify",
    "to_source",
    "parse_scale",
    "scale_from_source",
    "identity_scale",
    "builtin_setting",
    "builtin_scales",
    "BUILTIN_SETTINGS",
]


class Expr:
    """Base expression node. Immutable; structural equality."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Add(self, Mul(Const(-1.0), _coerce(other)))

    def __rsub__(self, other):
        return Add(_coerce(other), Mul(Const(-1.0), self))

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Mul(self, Recip(_coerce(other)))

    def __rtruediv__(self, other):
        return Mul(_coerce(other), Recip(self))

    def __neg__(self):
        return Mul(Const(-1.0), self)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(float(value))


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str  # "x" or "t"


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Recip(Expr):
    arg: Expr


def diff(expr: Expr, var: str) -> Expr:
    """Symbolic partial derivative of expr with respect to "x" or "t"."""
    if isinstance(expr, Const):
        return Const(0.0)
    if isinstance(expr, Var):
        return Const(1.0 if expr.name == var else 0.0)
    if isinstance(expr, Add):
        return Add(diff(expr.left, var), diff(expr.right, var))
    if isinstance(expr, Mul):
        return Add(
            Mul(diff(expr.left, var), expr.right),
            Mul(expr.left, diff(expr.right, var)),
        )
    if isinstance(expr, Sin):
        return Mul(Cos(expr.arg), diff(expr.arg, var))
    if isinstance(expr, Cos):
        return Mul(Const(-1.0), Mul(Sin(expr.arg), diff(expr.arg, var)))
    if isinstance(expr, Recip):
        # d(1/u) = -u' / u^2
        return Mul(
            Const(-1.0),
            Mul(diff(expr.arg, var), Recip(Mul(expr.arg, expr.arg))),
        )
    raise TypeError(f"cannot differentiate {type(expr).__name__}")


def simplify(expr: Expr) -> Expr:
    """Fold constants and drop additive/multiplicative identities."""
    if isinstance(expr, Add):
        left, right = simplify(expr.left), simplify(expr.right)
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(left.value + right.value)
        if isinstance(left, Const) and left.value == 0.0:
            return right
        if isinstance(right, Const) and right.value == 0.0:
            return left
        return Add(left, right)
    if isinstance(expr, Mul):
        left, right = simplify(expr.left), simplify(expr.right)
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(left.value * right.value)
        if isinstance(left, Const):
            if left.value == 0.0:
                return Const(0.0)
            if left.value == 1.0:
                return right
        if isinstance(right, Const):
            if right.value == 0.0:
                return Const(0.0)
            if right.value == 1.0:
                return left
        return Mul(left, right)
    if isinstance(expr, Sin):
        arg = simplify(expr.arg)
        if isinstance(arg, Const):
            return Const(math.sin(arg.value))
        return Sin(arg)
    if isinstance(expr, Cos):
        arg = simplify(expr.arg)
        if isinstance(arg, Const):
            return Const(math.cos(arg.value))
        return Cos(arg)
    if isinstance(expr, Recip):
        arg = simplify(expr.arg)
        if isinstance(arg, Const) and arg.value != 0.0:
            return Const(1.0 / arg.value)
        return Recip(arg)
    return expr


_PRECEDENCE = {Add: 1, Mul: 2}


def _fmt_const(value: float) -> str:
    text = repr(float(value))
    return f"({text})" if value < 0 else text


def to_source(expr: Expr) -> str:
    """Render an expression as parseable (and Python-evaluable) source."""
    if isinstance(expr, Const):
        return _fmt_const(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Sin):
        return f"sin({to_source(expr.arg)})"
    if isinstance(expr, Cos):
        return f"cos({to_source(expr.arg)})"
    if isinstance(expr, Recip):
        return f"1/({to_source(expr.arg)})"
    if isinstance(expr, Add):
        # a + (-1)*b renders as subtraction
        if (
            isinstance(expr.right, Mul)
            and isinstance(expr.right.left, Const)
            and expr.right.left.value == -1.0
        ):
            return f"{to_source(expr.left)} - {_wrap(expr.right.right, Add)}"
        return f"{to_source(expr.left)} + {_wrap(expr.right, Add)}"
    if isinstance(expr, Mul):
        if isinstance(expr.right, Recip):
            return f"{_wrap(expr.left, Mul)}/({to_source(expr.right.arg)})"
        return f"{_wrap(expr.left, Mul)}*{_wrap(expr.right, Mul)}"
    raise TypeError(f"cannot render {type(expr).__name__}")


def _wrap(expr: Expr, parent: type) -> str:
    text = to_source(expr)
    if _PRECEDENCE.get(type(expr), 3) < _PRECEDENCE[parent]:
        return f"({text})"
    # right operand of a subtraction/product must not re-associate
    if type(expr) is parent:
        return f"({text})"
    return text


class ScaleDerivativeError(RuntimeError):
    """Raised when |dg/dx| falls below the runtime guard along a trajectory.

    The protocol divides by dg/dx, so a vanishing derivative would blow up
    silently; this converts it into a diagnosed abort.
    """

    def __init__(self, agent: int, time: float, state: float, value: float):
        self.agent = agent
        self.time = time
        self.state = state
        self.value = value
        super().__init__(
            f"dg/dx of agent {agent} is {value:.3e} at t={time:.6f}, "
            f"x={state:.6f}; scaled consensus requires a nonvanishing "
            f"state derivative"
        )


class ScaleFunction:
    """A scaling g(x, t) bundled with compiled value and partial evaluators.

    ``eval_all(x, t)`` returns ``(g, dg/dx, dg/dt)`` in one call; it is the
    hot path of the simulator.
    """

    __slots__ = ("expr", "dx_expr", "dt_expr", "source", "eval_all")

    def __init__(self, expr: Expr, source: str | None = None):
        self.expr = simplify(expr)
        self.dx_expr = simplify(diff(self.expr, "x"))
        self.dt_expr = simplify(diff(self.expr, "t"))
        self.source = source if source is not None else to_source(self.expr)
        body = (
            f"lambda x, t: ({to_source(self.expr)}, "
            f"{to_source(self.dx_expr)}, {to_source(self.dt_expr)})"
        )
        self.eval_all = eval(  # compiled from our own AST, not raw user text
            body, {"sin": math.sin, "cos": math.cos, "__builtins__": {}}
        )

    def value(self, x: float, t: float) -> float:
        return self.eval_all(x, t)[0]

    def d_dx(self, x: float, t: float) -> float:
        return self.eval_all(x, t)[1]

    def d_dt(self, x: float, t: float) -> float:
        return self.eval_all(x, t)[2]

    def __repr__(self):
        return f"ScaleFunction({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, ScaleFunction) and self.expr == other.expr

    def __hash__(self):
        return hash(self.expr)


# ---------------------------------------------------------------------------
# Infix parser
# ---------------------------------------------------------------------------

class ScaleParseError(ValueError):
    """Scale expression rejected, with the offending position."""

    def __init__(self, source: str, pos: int, message: str):
        self.source = source
        self.pos = pos
        super().__init__(f"{message} at position {pos} in {source!r}")


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)

_MAX_POWER = 12


def parse_scale(source: str) -> Expr:
    """Parse the scale grammar: + - * / ^int, sin, cos, x, t, pi, numbers."""
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            rest = source[pos:]
            if rest.strip():
                bad = pos + len(rest) - len(rest.lstrip())
                raise ScaleParseError(source, bad, "unexpected character")
            break
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(source)))
    state = {"i": 0}

    def peek():
        return tokens[state["i"]]

    def advance():
        tok = tokens[state["i"]]
        state["i"] += 1
        return tok

    def expect(op):
        kind, text, at = peek()
        if kind != "op" or text != op:
            raise ScaleParseError(source, at, f"expected {op!r}")
        advance()

    def parse_expr():
        node = parse_term()
        while peek()[:2] in (("op", "+"), ("op", "-")):
            _, op, _ = advance()
            right = parse_term()
            if op == "+":
                node = Add(node, right)
            else:
                node = Add(node, Mul(Const(-1.0), right))
        return node

    def parse_term():
        node = parse_unary()
        while peek()[:2] in (("op", "*"), ("op", "/")):
            _, op, _ = advance()
            right = parse_unary()
            if op == "*":
                node = Mul(node, right)
            else:
                node = Mul(node, Recip(right))
        return node

    def parse_unary():
        kind, text, _ = peek()
        if kind == "op" and text == "-":
            advance()
            inner = parse_unary()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Mul(Const(-1.0), inner)
        return parse_power()

    def parse_power():
        node = parse_atom()
        if peek()[:2] == ("op", "^"):
            advance()
            kind, text, at = peek()
            if kind != "num" or not text.isdigit():
                raise ScaleParseError(
                    source, at, "exponent must be a nonnegative integer"
                )
            advance()
            exponent = int(text)
            if exponent > _MAX_POWER:
                raise ScaleParseError(source, at, f"exponent > {_MAX_POWER}")
            if exponent == 0:
                return Const(1.0)
            result = node
            for _ in range(exponent - 1):
                result = Mul(result, node)
            return result
        return node

    def parse_atom():
        kind, text, at = advance()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in ("x", "t"):
                return Var(text)
            if text == "pi":
                return Const(math.pi)
            if text in ("sin", "cos"):
                expect("(")
                arg = parse_expr()
                expect(")")
                return Sin(arg) if text == "sin" else Cos(arg)
            raise ScaleParseError(source, at, f"unknown name {text!r}")
        if kind == "op" and text == "(":
            node = parse_expr()
            expect(")")
            return node
        raise ScaleParseError(source, at, "expected a value")

    node = parse_expr()
    kind, _, at = peek()
    if kind != "end":
        raise ScaleParseError(source, at, "trailing input")
    return node


def scale_from_source(source: str) -> ScaleFunction:
    """Parse and compile a scale, keeping the original source as its label."""
    return ScaleFunction(parse_scale(source), source=source)


def identity_scale() -> ScaleFunction:
    """Plain consensus: g(x, t) = x."""
    return scale_from_source("x")


# ---------------------------------------------------------------------------
# Built-in six-agent settings
# ---------------------------------------------------------------------------

_UP = "(0.5*sin(2*pi*t)+1)"
_DOWN = "(-0.5*sin(2*pi*t)-1)"
_BEND = "(x + x/(1 + 0.1*x^2))"

BUILTIN_SETTINGS: dict[str, tuple[str, ...]] = {
    # time-varying factor times a heterogeneous nonlinear part
    "C1": (
        f"{_UP}*(5*sin(0.2*x)+2*x)",
        f"{_DOWN}*(2*sin(0.5*x)+2*x)",
        f"{_DOWN}*(sin(x)+2*x)",
        f"{_DOWN}*(5*cos(0.2*x)-2*x)",
        f"{_UP}*(2*cos(0.5*x)-2*x)",
        f"{_UP}*(cos(x)-2*x)",
    ),
    # time-invariant nonlinear scales
    "C2": (
        "5*sin(0.2*x)+2*x",
        "10*sin(0.5*x)+10*x",
        "sin(x)+2*x",
        "-5*cos(0.2*x)+2*x",
        "-10*cos(0.5*x)+10*x",
        "-cos(x)+2*x",
    ),
    # sinusoidal time factor times a shared rational nonlinearity
    "C3": (
        f"{_UP}*{_BEND}",
        f"{_DOWN}*{_BEND}",
        f"{_DOWN}*{_BEND}",
        f"{_DOWN}*{_BEND}",
        f"{_UP}*{_BEND}",
        f"{_UP}*{_BEND}",
    ),
    # constant factors of mixed sign times the same nonlinearity
    "C4": (
        f"{_BEND}",
        f"5*{_BEND}",
        f"{_BEND}",
        f"-{_BEND}",
        f"-5*{_BEND}",
        f"-{_BEND}",
    ),
}


def builtin_setting(name: str, agent_index: int) -> ScaleFunction:
    """Scale of one agent (1-based index) in a built-in setting C1..C4."""
    try:
        sources = BUILTIN_SETTINGS[name]
    except KeyError:
        raise ValueError(
            f"unknown scale setting {name!r}; choose from "
            f"{sorted(BUILTIN_SETTINGS)}"
        ) from None
    if not 1 <= agent_index <= len(sources):
        raise ValueError(
            f"agent index {agent_index} out of range 1..{len(sources)} "
            f"for setting {name}"
        )
    return scale_from_source(sources[agent_index - 1])


def builtin_scales(name: str) -> tuple[ScaleFunction, ...]:
    """All six scales of a built-in setting, in agent order."""
    if name not in BUILTIN_SETTINGS:
        raise ValueError(
            f"unknown scale setting {name!r}; choose from "
            f"{sorted(BUILTIN_SETTINGS)}"
        )
    return tuple(
        builtin_setting(name, i + 1) for i in range(len(BUILTIN_SETTINGS[name]))
    )
