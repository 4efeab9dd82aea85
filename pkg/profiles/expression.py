"""Profile expression language.

Grammar (whitespace-insensitive)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | ident | 'sqrt' '(' expr ')' | '(' expr ')'

The only variable is ``z``; any other identifier must be bound in the
``constants`` mapping and is folded to a :class:`Constant` at parse time.
"""
import math
import re
from dataclasses import dataclass
from typing import ClassVar, NamedTuple

import numpy as np

from utils.errors import DomainError, ParseError

__all__ = [
    "ExprAst",
    "Constant",
    "Variable",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Sqrt",
    "Neg",
    "parse_expression",
    "tokenize",
]

VARIABLE = "z"
NUMBER_RE = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
TOKEN_RE = re.compile(
    rf"\s*(?:(?P<number>{NUMBER_RE})|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])|(?P<invalid>\S))"
)
ATOM_START = frozenset({"number", "identifier", "'('", "'-'", "sqrt"})


class Token(NamedTuple):
    kind: str  # number / ident / op / invalid / end
    text: str
    offset: int  # byte offset into the source


def tokenize(text):
    tokens = []
    pos = 0
    while True:
        match = TOKEN_RE.match(text, pos)
        if match is None:
            # only trailing whitespace is left
            break
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), len(text[:start].encode("utf-8"))))
        pos = match.end()
    tokens.append(Token("end", "", len(text.encode("utf-8"))))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class ExprAst:
    """Base node. Every node evaluates on floats and numpy arrays alike."""

    precedence: ClassVar[int] = 5

    def evaluate(self, z):
        raise NotImplementedError

    def derivative(self):
        raise NotImplementedError

    def depends_on_z(self):
        raise NotImplementedError

    def __call__(self, z):
        return self.evaluate(z)


@dataclass(frozen=True)
class Constant(ExprAst):
    value: float

    @property
    def precedence(self):
        return 3 if self.value < 0 else 5

    def evaluate(self, z):
        return np.float64(self.value)

    def derivative(self):
        return ZERO

    def depends_on_z(self):
        return False

    def __str__(self):
        text = repr(float(self.value))
        return text[:-2] if text.endswith(".0") else text


@dataclass(frozen=True)
class Variable(ExprAst):

    def evaluate(self, z):
        return z

    def derivative(self):
        return ONE

    def depends_on_z(self):
        return True

    def __str__(self):
        return VARIABLE


ZERO = Constant(0.0)
ONE = Constant(1.0)


@dataclass(frozen=True)
class _Binary(ExprAst):
    left: ExprAst
    right: ExprAst

    symbol: ClassVar[str] = "?"

    def depends_on_z(self):
        return self.left.depends_on_z() or self.right.depends_on_z()

    def __str__(self):
        left = str(self.left)
        right = str(self.right)
        if self.left.precedence < self.precedence:
            left = f"({left})"
        # grammar is left-associative: equal precedence on the right keeps its parentheses
        if self.right.precedence <= self.precedence:
            right = f"({right})"
        return f"{left} {self.symbol} {right}" if self.precedence == 1 else f"{left}{self.symbol}{right}"


@dataclass(frozen=True)
class Add(_Binary):
    precedence: ClassVar[int] = 1
    symbol: ClassVar[str] = "+"

    def evaluate(self, z):
        return self.left.evaluate(z) + self.right.evaluate(z)

    def derivative(self):
        return _add(self.left.derivative(), self.right.derivative())


@dataclass(frozen=True)
class Sub(_Binary):
    precedence: ClassVar[int] = 1
    symbol: ClassVar[str] = "-"

    def evaluate(self, z):
        return self.left.evaluate(z) - self.right.evaluate(z)

    def derivative(self):
        return _sub(self.left.derivative(), self.right.derivative())


@dataclass(frozen=True)
class Mul(_Binary):
    precedence: ClassVar[int] = 2
    symbol: ClassVar[str] = "*"

    def evaluate(self, z):
        return self.left.evaluate(z) * self.right.evaluate(z)

    def derivative(self):
        return _add(_mul(self.left.derivative(), self.right), _mul(self.left, self.right.derivative()))


@dataclass(frozen=True)
class Div(_Binary):
    precedence: ClassVar[int] = 2
    symbol: ClassVar[str] = "/"

    def evaluate(self, z):
        return self.left.evaluate(z) / self.right.evaluate(z)

    def derivative(self):
        numerator = _sub(_mul(self.left.derivative(), self.right), _mul(self.left, self.right.derivative()))
        return _div(numerator, _pow(self.right, 2.0))


@dataclass(frozen=True)
class Pow(ExprAst):
    """``base ^ exponent`` with a z-free exponent."""

    base: ExprAst
    exponent: ExprAst

    precedence: ClassVar[int] = 4

    def evaluate(self, z):
        return np.power(self.base.evaluate(z), self.exponent.evaluate(z))

    def derivative(self):
        c = float(self.exponent.evaluate(0.0))
        return _mul(_mul(Constant(c), _pow(self.base, c - 1.0)), self.base.derivative())

    def depends_on_z(self):
        return self.base.depends_on_z()

    def __str__(self):
        base = str(self.base)
        exponent = str(self.exponent)
        if self.base.precedence <= self.precedence:
            base = f"({base})"
        if self.exponent.precedence < 3:
            exponent = f"({exponent})"
        return f"{base}^{exponent}"


@dataclass(frozen=True)
class Sqrt(ExprAst):
    arg: ExprAst

    def evaluate(self, z):
        return np.sqrt(self.arg.evaluate(z))

    def derivative(self):
        return _div(self.arg.derivative(), _mul(Constant(2.0), self))

    def depends_on_z(self):
        return self.arg.depends_on_z()

    def __str__(self):
        return f"sqrt({self.arg})"


@dataclass(frozen=True)
class Neg(ExprAst):
    arg: ExprAst

    precedence: ClassVar[int] = 3

    def evaluate(self, z):
        return -self.arg.evaluate(z)

    def derivative(self):
        return _neg(self.arg.derivative())

    def depends_on_z(self):
        return self.arg.depends_on_z()

    def __str__(self):
        arg = str(self.arg)
        if self.arg.precedence < 3:
            arg = f"({arg})"
        return f"-{arg}"


# constant-folding constructors used by derivative()

def _is_const(node, value=None):
    return isinstance(node, Constant) and (value is None or node.value == value)


def _add(a, b):
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return Constant(a.value + b.value)
    return Add(a, b)


def _sub(a, b):
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return Constant(a.value - b.value)
    return Sub(a, b)


def _mul(a, b):
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        return Constant(a.value * b.value)
    return Mul(a, b)


def _div(a, b):
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Constant(a.value / b.value)
    return Div(a, b)


def _neg(a):
    if _is_const(a):
        return Constant(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _pow(base, c):
    if c == 0.0:
        return ONE
    if c == 1.0:
        return base
    return Pow(base, Constant(c))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:

    def __init__(self, text, constants):
        self.tokens = tokenize(text)
        self.pos = 0
        self.constants = dict(constants or {})

    @property
    def current(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, expected, what=None):
        token = self.current
        if what is None:
            what = "unexpected end of input" if token.kind == "end" else f"unexpected token {token.text!r}"
        raise ParseError(what, token.offset, expected)

    def is_op(self, *symbols):
        return self.current.kind == "op" and self.current.text in symbols

    def parse(self):
        node = self.expr()
        if self.current.kind != "end":
            self.fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.is_op("+", "-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def term(self):
        node = self.factor()
        while self.is_op("*", "/"):
            op = self.advance().text
            right = self.factor()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def factor(self):
        if self.is_op("-"):
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.advance()
            start = self.current.offset
            exponent = self.factor()
            if exponent.depends_on_z():
                raise ParseError("exponent must not depend on z", start, {"constant exponent"})
            return Pow(base, exponent)
        return base

    def atom(self):
        token = self.current
        if token.kind == "number":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise ParseError(f"number {token.text!r} overflows", token.offset)
            return Constant(value)
        if token.kind == "ident":
            if token.text == "sqrt":
                self.advance()
                if not self.is_op("("):
                    self.fail({"'('"})
                self.advance()
                arg = self.expr()
                if not self.is_op(")"):
                    self.fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
                self.advance()
                return Sqrt(arg)
            if token.text == VARIABLE:
                self.advance()
                return Variable()
            if token.text in self.constants:
                self.advance()
                return Constant(float(self.constants[token.text]))
            self.fail({VARIABLE, "sqrt", *self.constants}, f"unknown identifier {token.text!r}")
        if self.is_op("("):
            self.advance()
            node = self.expr()
            if not self.is_op(")"):
                self.fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
            self.advance()
            return node
        self.fail(ATOM_START)


def parse_expression(text, constants=None):
    """Parse ``text`` into an AST; ``constants`` binds named values (e.g. ``R``)."""
    if not isinstance(text, str):
        raise DomainError(f"expression must be a string, got {type(text).__name__}")
    for name in constants or {}:
        if name in (VARIABLE, "sqrt"):
            raise DomainError(f"constant name {name!r} is reserved")
    return _Parser(text, constants).parse()
