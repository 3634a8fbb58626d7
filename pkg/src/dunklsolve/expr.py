"""Arithmetic expressions over ``x1 .. xd`` for boundary data and test fields.

Grammar, loosest binding first::

    expr  := expr ('+' | '-') expr
           | expr ('*' | '/') expr
           | '-' expr
           | expr '^' expr          (right associative)
           | NUMBER | 'pi' | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Parsing is Pratt-style recursive descent.  Implicit multiplication is not
accepted, so ``2x1`` is a syntax error.  Evaluation is vectorized over a
stack of points and raises :class:`ExprEvalError` instead of producing
``nan`` or ``inf``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Expression",
    "ExprError",
    "ExprSyntaxError",
    "ExprEvalError",
    "parse",
    "evaluate",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
]


class ExprError(ValueError):
    """Base class; ``position`` is a 0-based character offset into the source."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


class ExprSyntaxError(ExprError):
    pass


class ExprEvalError(ExprError):
    def __init__(self, message: str, node: "Node"):
        super().__init__(f"{message} in '{node}'", node.pos)
        self.node = node


# -- tree -----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return repr(self.value) if self.value >= 0 else f"(-{-self.value!r})"


@dataclass(frozen=True)
class Var:
    index: int
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Node = Num | Var | Neg | BinOp | Call

FUNCTIONS: dict[str, int] = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
    "pow": 2,
}
CONSTANTS = {"pi": math.pi}

# -- lexer ----------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[i]!r}", i)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), i))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# -- parser ---------------------------------------------------------------------

_INFIX = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_PREFIX_BP = 30
MAX_DEPTH = 200
_VAR = re.compile(r"x([1-9]\d*)")


class _Parser:
    def __init__(self, text: str, dimension: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.d = dimension
        self.depth = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str, what: str) -> _Tok:
        if self.tok.text != text or self.tok.kind != "op":
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ExprSyntaxError(f"expected {what}, found {found}", self.tok.pos)
        return self.advance()

    def parse(self) -> Node:
        node = self.expression(0)
        if self.tok.kind != "end":
            t = self.tok
            msg = "unbalanced parenthesis" if t.text == ")" else f"unexpected {t.text!r}"
            raise ExprSyntaxError(msg, t.pos)
        return node

    def expression(self, rbp: int) -> Node:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExprSyntaxError("expression nested too deeply", self.tok.pos)
        try:
            return self._expression(rbp)
        finally:
            self.depth -= 1

    def _expression(self, rbp: int) -> Node:
        left = self.prefix(self.advance())
        while self.tok.kind == "op" and rbp < _INFIX.get(self.tok.text, -1):
            t = self.advance()
            bp = _INFIX[t.text]
            # ^ is right associative
            right = self.expression(bp - 1 if t.text == "^" else bp)
            left = BinOp(t.text, left, right, pos=t.pos)
        return left

    def prefix(self, t: _Tok) -> Node:
        if t.kind == "num":
            value = float(t.text)
            if not math.isfinite(value):
                raise ExprSyntaxError("numeric literal out of range", t.pos)
            return Num(value, pos=t.pos)
        if t.kind == "name":
            return self.name(t)
        if t.kind == "op" and t.text == "-":
            return Neg(self.expression(_PREFIX_BP), pos=t.pos)
        if t.kind == "op" and t.text == "(":
            inner = self.expression(0)
            self.expect(")", "')' (unbalanced parenthesis)")
            return inner
        if t.kind == "end":
            raise ExprSyntaxError("unexpected end of input", t.pos)
        raise ExprSyntaxError(f"unexpected {t.text!r}", t.pos)

    def name(self, t: _Tok) -> Node:
        called = self.tok.kind == "op" and self.tok.text == "("
        if t.text in FUNCTIONS:
            if not called:
                raise ExprSyntaxError(f"function {t.text!r} must be called", t.pos)
            self.advance()
            args = [self.expression(0)]
            while self.tok.kind == "op" and self.tok.text == ",":
                self.advance()
                args.append(self.expression(0))
            self.expect(")", "')' (unbalanced parenthesis)")
            arity = FUNCTIONS[t.text]
            if len(args) != arity:
                raise ExprSyntaxError(
                    f"{t.text} takes {arity} argument(s), got {len(args)}", t.pos
                )
            return Call(t.text, tuple(args), pos=t.pos)
        if called:
            raise ExprSyntaxError(f"unknown function {t.text!r}", t.pos)
        if t.text in CONSTANTS:
            return Num(CONSTANTS[t.text], pos=t.pos)
        m = _VAR.fullmatch(t.text)
        if m is None:
            raise ExprSyntaxError(f"unknown identifier {t.text!r}", t.pos)
        index = int(m.group(1))
        if index > self.d:
            raise ExprSyntaxError(
                f"variable {t.text} exceeds dimension {self.d}", t.pos
            )
        return Var(index, pos=t.pos)


def parse(text: str, d: int) -> "Expression":
    """Parse ``text`` as an expression in the variables ``x1 .. xd``.

    >>> parse("2+3*4", 1).evaluate([0.0])
    14.0
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return Expression(_Parser(text, d).parse(), d, text)


# -- evaluation -----------------------------------------------------------------


def _finite(node, value, what="non-finite result"):
    if not np.all(np.isfinite(value)):
        raise ExprEvalError(what, node)
    return value


def _pow(node, base, expo):
    if np.any((base < 0) & (expo != np.round(expo))):
        raise ExprEvalError("negative base with non-integer exponent", node)
    if np.any((base == 0) & (expo < 0)):
        raise ExprEvalError("division by zero", node)
    return np.power(base, expo)


def _div(node, a, b):
    if np.any(b == 0):
        raise ExprEvalError("division by zero", node)
    return a / b


def _log(node, a):
    if np.any(a <= 0):
        raise ExprEvalError("logarithm of a nonpositive number", node)
    return np.log(a)


def _sqrt(node, a):
    if np.any(a < 0):
        raise ExprEvalError("square root of a negative number", node)
    return np.sqrt(a)


_UNARY: dict[str, Callable] = {
    "sin": lambda n, a: np.sin(a),
    "cos": lambda n, a: np.cos(a),
    "exp": lambda n, a: np.exp(a),
    "log": _log,
    "sqrt": _sqrt,
    "abs": lambda n, a: np.abs(a),
}
_BINARY: dict[str, Callable] = {
    "+": lambda n, a, b: a + b,
    "-": lambda n, a, b: a - b,
    "*": lambda n, a, b: a * b,
    "/": _div,
    "^": _pow,
    "pow": _pow,
    "min": lambda n, a, b: np.minimum(a, b),
    "max": lambda n, a, b: np.maximum(a, b),
}


def _eval(node, pts):
    if isinstance(node, Num):
        return np.full(pts.shape[0], node.value)
    if isinstance(node, Var):
        return pts[:, node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, pts)
    if isinstance(node, BinOp):
        a = _eval(node.left, pts)
        b = _eval(node.right, pts)
        return _finite(node, _BINARY[node.op](node, a, b))
    if isinstance(node, Call):
        args = [_eval(a, pts) for a in node.args]
        fn = _UNARY.get(node.name) or _BINARY[node.name]
        return _finite(node, fn(node, *args))
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: "Expression", point):
    """Evaluate at one point ``(d,)`` (returns float) or at points ``(n, d)``."""
    pts = np.asarray(point, dtype=float)
    single = pts.ndim <= 1
    pts = pts.reshape(1, -1) if single else pts
    if pts.ndim != 2 or pts.shape[1] != e.dimension:
        raise ValueError(
            f"expected points of dimension {e.dimension}, got shape {np.shape(point)}"
        )
    if not np.all(np.isfinite(pts)):
        raise ExprEvalError("non-finite input coordinates", e.tree)
    with np.errstate(all="ignore"):
        out = _eval(e.tree, pts)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class Expression:
    """A parsed expression bound to a dimension.  Calling it evaluates it."""

    tree: Node
    dimension: int
    source: str = field(default="", compare=False)

    def evaluate(self, point):
        return evaluate(self, point)

    __call__ = evaluate

    def __str__(self):
        return str(self.tree)

    def variables(self) -> set[int]:
        out = set()
        stack = [self.tree]
        while stack:
            n = stack.pop()
            if isinstance(n, Var):
                out.add(n.index)
            elif isinstance(n, Neg):
                stack.append(n.operand)
            elif isinstance(n, BinOp):
                stack += [n.left, n.right]
            elif isinstance(n, Call):
                stack += list(n.args)
        return out
