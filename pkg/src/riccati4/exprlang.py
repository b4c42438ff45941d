"""Tiny expression language for perturbation functions of t.

Grammar (highest binding first):

    atom   := NUMBER | 't' | FUNC '(' expr ')' | '(' expr ')'
    power  := atom ('^' unary)?          # right associative
    unary  := '-' unary | power          # so -t^2 == -(t^2)
    term   := unary (('*'|'/') unary)*
    expr   := term (('+'|'-') term)*

FUNC is one of exp, log, sin, cos, abs.  The only variable is t.
Evaluation is total on the declared domain: division by zero and log of a
non-positive argument raise DomainError instead of returning inf/nan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    EvalOverflow,
    ExpressionSyntaxError,
    UnknownIdentifier,
)

_FUNCTIONS = ("exp", "log", "sin", "cos", "abs")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class FunctionExpr:
    """Parsed scalar function of t; immutable and thread-safe."""

    ast: object
    source: str

    def __call__(self, t):
        return _eval_node(self.ast, t)

    def __str__(self):
        return to_string(self.ast)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise ExpressionSyntaxError(message, self.pos)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self):
        while self.peek() in " \t\n\r" and self.peek():
            self.pos += 1

    def expect(self, ch):
        self.skip_ws()
        if self.peek() != ch:
            self.error(f"expected '{ch}'")
        self.pos += 1

    def parse(self):
        node = self.expr()
        self.skip_ws()
        if self.pos < len(self.text):
            self.error(f"unexpected character {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                node = Bin("+", node, self.term())
            elif ch == "-":
                self.pos += 1
                node = Bin("-", node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                node = Bin("*", node, self.unary())
            elif ch == "/":
                self.pos += 1
                node = Bin("/", node, self.unary())
            else:
                return node

    def unary(self):
        self.skip_ws()
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        self.skip_ws()
        if self.peek() == "^":
            self.pos += 1
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        self.skip_ws()
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha() or ch == "_":
            return self.identifier()
        if ch == "":
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")

    def number(self):
        start = self.pos
        seen_dot = False
        while self.peek().isdigit() or self.peek() == ".":
            if self.peek() == ".":
                if seen_dot:
                    self.error("second '.' in number")
                seen_dot = True
            self.pos += 1
        # optional exponent: 1e-3, 2.5E+4
        if self.peek() in "eE":
            mark = self.pos
            self.pos += 1
            if self.peek() in "+-":
                self.pos += 1
            if not self.peek().isdigit():
                self.pos = mark  # 'e' belonged to something else; bare 'e' is invalid later
            else:
                while self.peek().isdigit():
                    self.pos += 1
        text = self.text[start:self.pos]
        try:
            return Num(float(text))
        except ValueError:
            self.pos = start
            self.error(f"bad number literal {text!r}")

    def identifier(self):
        start = self.pos
        while self.peek().isalnum() or self.peek() == "_":
            self.pos += 1
        name = self.text[start:self.pos]
        if name == "t":
            return Var()
        if name in _FUNCTIONS:
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return Call(name, node)
        raise UnknownIdentifier(f"unknown identifier {name!r} at position {start}")


def parse(text: str) -> FunctionExpr:
    """Parse an expression string into an immutable FunctionExpr."""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return FunctionExpr(ast=_Parser(text).parse(), source=text)


def _check_finite(value):
    arr = np.asarray(value)
    if not np.all(np.isfinite(arr)):
        raise EvalOverflow("evaluation produced a non-finite value")
    return value


def _eval_node(node, t):
    if isinstance(node, Num):
        if np.ndim(t) == 0:
            return node.value
        return np.full(np.shape(t), node.value, dtype=float)
    if isinstance(node, Var):
        return np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    if isinstance(node, Neg):
        return -_eval_node(node.arg, t)
    if isinstance(node, Call):
        arg = _eval_node(node.arg, t)
        if node.func == "exp":
            with np.errstate(over="ignore"):
                return _check_finite(np.exp(arg))
        if node.func == "log":
            if np.any(np.asarray(arg) <= 0.0):
                raise DomainError("log of non-positive argument")
            return np.log(arg)
        if node.func == "sin":
            return np.sin(arg)
        if node.func == "cos":
            return np.cos(arg)
        if node.func == "abs":
            return np.abs(arg)
        raise UnknownIdentifier(node.func)
    if isinstance(node, Bin):
        left = _eval_node(node.left, t)
        right = _eval_node(node.right, t)
        if node.op == "+":
            return _check_finite(left + right)
        if node.op == "-":
            return _check_finite(left - right)
        if node.op == "*":
            return _check_finite(left * right)
        if node.op == "/":
            if np.any(np.asarray(right) == 0.0):
                raise DomainError("division by zero")
            return _check_finite(left / right)
        if node.op == "^":
            with np.errstate(over="ignore", invalid="ignore"):
                out = np.power(left, right)
            arr = np.asarray(out)
            if np.any(np.isnan(arr)):
                raise DomainError("fractional power of a negative base")
            return _check_finite(out)
    raise TypeError(f"unknown AST node {node!r}")


def evaluate(expr: FunctionExpr, t):
    """Evaluate expr at scalar or ndarray t."""
    return expr(t)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node):
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return 9


def to_string(node) -> str:
    """Render an AST; parse(to_string(ast)) evaluates identically."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        inner = to_string(node.arg)
        if _prec(node.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Bin):
        lp, rp = _prec(node.left), _prec(node.right)
        mine = _PREC[node.op]
        left = to_string(node.left)
        right = to_string(node.right)
        # '-' and '/' are left associative, '^' right associative
        if lp < mine or (node.op == "^" and lp == mine):
            left = f"({left})"
        if rp < mine or (node.op in "-/" and rp == mine):
            right = f"({right})"
        return f"{left} {node.op} {right}" if node.op in "+-" else f"{left}{node.op}{right}"
    raise TypeError(f"unknown AST node {node!r}")


def is_zero(expr: FunctionExpr) -> bool:
    """True when the expression is syntactically the constant 0."""
    node = expr.ast
    while isinstance(node, Neg):
        node = node.arg
    return isinstance(node, Num) and node.value == 0.0


ZERO = parse("0")
