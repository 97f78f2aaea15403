"""Recursive-descent parser and vectorized evaluator for scalar expressions.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = ("-" | "+") , unary | power ;
    power   = atom , [ "^" , unary ] ;          (* right-associative *)
    atom    = number | constant | variable
            | function , "(" , expr , ")"
            | "(" , expr , ")" ;
    function = "sin" | "cos" | "exp" | "sqrt" | "abs" | "log" ;
    constant = "pi" | "e" ;
    variable = "x" (dimension 1 only) | "x1" | ... | "xd" ;

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``; unary minus
binds tighter than ``*`` and ``/``. Whitespace is insignificant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ExprEvaluationError, ExprSyntaxError
from .objective import BoxDomain, ObjectiveFunction

__all__ = [
    "Const",
    "Var",
    "Unary",
    "Binary",
    "Expression",
    "ExprNameError",
    "ExprArityError",
    "parse",
    "evaluate",
    "to_text",
    "parse_objective",
    "FUNCTIONS",
]


class ExprNameError(ExprSyntaxError):
    """Identifier that is neither a function, a constant nor a declared variable."""


class ExprArityError(ExprSyntaxError):
    """Function called with the wrong number of arguments (or used without a call)."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Const, Var, Unary, Binary]

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "log": np.log,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
_BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

_ATOM_START = frozenset({"number", "identifier", "'('"})
_UNARY_START = _ATOM_START | {"'-'", "'+'"}
_AFTER_OPERAND = frozenset({"'+'", "'-'", "'*'", "'/'", "'^'"})


@dataclass(frozen=True)
class _Token:
    kind: str  # "number", "ident", "op", "end"
    text: str
    offset: int  # byte offset into the source


@dataclass(frozen=True)
class Expression:
    """A parsed expression over ``dim`` variables."""

    root: Node
    dim: int
    source: str = field(default="", compare=False)

    def __call__(self, values):
        return evaluate(self, values)

    def __str__(self):
        return to_text(self)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        offset = len(src[:pos].encode("utf-8"))
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", src, offset, _UNARY_START)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), offset))
        pos = m.end()
    tokens.append(_Token("end", "", len(src.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, src: str, dim: int):
        self.src = src
        self.dim = dim
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _fail(self, expected, cls=ExprSyntaxError, message=None):
        tok = self.tok
        if message is None:
            what = "end of input" if tok.kind == "end" else f"token {tok.text!r}"
            message = f"unexpected {what}"
        raise cls(message, self.src, tok.offset, expected)

    def _accept(self, *ops):
        if self.tok.kind == "op" and self.tok.text in ops:
            tok = self.tok
            self.i += 1
            return tok
        return None

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail(_AFTER_OPERAND | {"end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while (tok := self._accept("+", "-")) is not None:
            node = Binary(tok.text, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while (tok := self._accept("*", "/")) is not None:
            node = Binary(tok.text, node, self.unary())
        return node

    def unary(self) -> Node:
        if self._accept("-") is not None:
            return Unary("neg", self.unary())
        if self._accept("+") is not None:
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self._accept("^") is not None:
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            value = float(tok.text)
            if not math.isfinite(value):
                self._fail((), message=f"numeric literal {tok.text!r} out of range")
            self.i += 1
            return Const(value)
        if tok.kind == "ident":
            return self._identifier(tok)
        if self._accept("(") is not None:
            node = self.expr()
            if self._accept(")") is None:
                self._fail(_AFTER_OPERAND | {"')'"})
            return node
        self._fail(_UNARY_START)

    def _identifier(self, tok: _Token) -> Node:
        name = tok.text
        self.i += 1
        if name in FUNCTIONS:
            if self._accept("(") is None:
                self.i -= 1
                self._fail({"'('"}, ExprArityError, f"function {name!r} takes exactly one argument")
            arg = self.expr()
            if self.tok.kind == "op" and self.tok.text == ",":
                self._fail({"')'"}, ExprArityError, f"function {name!r} takes exactly one argument")
            if self._accept(")") is None:
                self._fail(_AFTER_OPERAND | {"')'"})
            return Unary(name, arg)
        if name in CONSTANTS:
            return Const(CONSTANTS[name])
        index = self._variable_index(name)
        if index is None:
            self.i -= 1
            names = ["x"] if self.dim == 1 else []
            names += [f"x{k}" for k in range(1, self.dim + 1)]
            self._fail(
                (),
                ExprNameError,
                f"unknown identifier {name!r} (variables: {', '.join(names)}; "
                f"constants: pi, e; functions: {', '.join(FUNCTIONS)})",
            )
        return Var(index)

    def _variable_index(self, name: str):
        if name == "x" and self.dim == 1:
            return 0
        m = re.fullmatch(r"x([1-9][0-9]*)", name)
        if m and int(m.group(1)) <= self.dim:
            return int(m.group(1)) - 1
        return None


def parse(src: str, dim: int) -> Expression:
    """Parse ``src`` as an expression in ``dim`` variables."""
    if int(dim) < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return Expression(_Parser(src, int(dim)).parse(), int(dim), src)


def _node_text(node: Node, dim: int) -> str:
    if isinstance(node, Const):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x" if dim == 1 else f"x{node.index + 1}"
    if isinstance(node, Unary):
        inner = _node_text(node.operand, dim)
        if node.op == "neg":
            return f"(-{inner})"
        return f"{node.op}({inner})"
    return f"({_node_text(node.left, dim)} {node.op} {_node_text(node.right, dim)})"


def to_text(e: Expression) -> str:
    """Fully parenthesized source text that reparses to the same tree."""
    return _node_text(e.root, e.dim)


def _eval(node: Node, X: np.ndarray, dim: int) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(X.shape[0], node.value)
    if isinstance(node, Var):
        return X[:, node.index]
    with np.errstate(all="ignore"):
        if isinstance(node, Unary):
            arg = _eval(node.operand, X, dim)
            out = np.negative(arg) if node.op == "neg" else FUNCTIONS[node.op](arg)
        else:
            out = _BINARY[node.op](_eval(node.left, X, dim), _eval(node.right, X, dim))
    if not np.all(np.isfinite(out)):
        raise ExprEvaluationError(_node_text(node, dim))
    return out


def evaluate(e: Expression, values):
    """Evaluate at one point (1-D ``values``) or many (rows of a 2-D array).

    Raises :class:`ExprEvaluationError` naming the first subexpression that
    produced a non-finite value (division by zero, ``sqrt`` or ``log`` of an
    invalid argument, overflow).
    """
    arr = np.asarray(values, dtype=float)
    single = arr.ndim <= 1
    X = arr.reshape(1, -1) if single else arr
    used = _max_var(e.root)
    if X.shape[1] < used + 1:
        raise ValueError(f"expression uses x{used + 1} but only {X.shape[1]} values were given")
    out = _eval(e.root, X, e.dim)
    return float(out[0]) if single else out


def _max_var(node: Node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Const):
        return -1
    if isinstance(node, Unary):
        return _max_var(node.operand)
    return max(_max_var(node.left), _max_var(node.right))


def parse_objective(src: str, domain: BoxDomain, name=None) -> ObjectiveFunction:
    """Build an :class:`ObjectiveFunction` from expression text over ``domain``."""
    e = parse(src, domain.dim)
    return ObjectiveFunction(lambda X: _eval(e.root, X, e.dim), domain, name or src, source=src)
