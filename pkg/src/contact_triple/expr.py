"""A small arithmetic expression language for user-supplied sections.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``* /``, which bind tighter than ``+ -``)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?
    primary := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

Names resolve against a variable signature (e.g. ``x1, p1, z``) and a set of
scalar parameters; anything else is an :class:`UnknownSymbol`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from . import jet as J
from .errors import DomainError, ExprSyntaxError, UnknownSymbol


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Param, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expr:
    tree: Node
    signature: tuple
    params: tuple

    def __str__(self):
        return to_source(self.tree)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None:
            start = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {source[start]!r}", start, {"number", "name", "operator"})
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source, signature, params):
        self.tokens = tokenize(source)
        self.i = 0
        self.signature = set(signature)
        self.params = set(params)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, pos = self.peek()
        if value != text or kind != "op":
            raise ExprSyntaxError(f"unexpected {value or 'end of input'!r}", pos, {repr(text)})
        self.advance()

    def parse(self):
        tree = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {value!r}", pos, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return tree

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, value, pos = self.advance()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if value not in J.FUNCTIONS:
                    raise UnknownSymbol(value)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value in self.signature:
                return Var(value)
            if value in self.params:
                return Param(value)
            raise UnknownSymbol(value)
        if (kind, value) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(
            f"unexpected {value or 'end of input'!r}", pos, {"number", "name", "'('", "'-'"}
        )


def parse(source: str, signature: Sequence[str], params: Sequence[str] = ()) -> Expr:
    tree = _Parser(source, signature, params).parse()
    return Expr(tree, tuple(signature), tuple(params))


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _fmt_num(v):
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_source(node: Node) -> str:
    """Print with the fewest parentheses that re-parse to the same tree."""
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        return f"({s})" if node.value < 0 else s
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        return f"-({inner})" if _prec(node.operand) < 3 else f"-{inner}"
    p = _PREC[node.op]
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        if _prec(node.left) < 5:
            left = f"({left})"
        if _prec(node.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def _div(a, b):
    if isinstance(a, J.Jet) or isinstance(b, J.Jet):
        if J.value_of(b) == 0.0:
            raise DomainError("division by zero")
        return a / b
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": J.power,
}


def evaluate(node: Node, env: Mapping[str, object], params: Mapping[str, float]):
    """Evaluate a tree. ``env`` values may be floats or :class:`Jet` objects."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Param):
        return float(params[node.name])
    if isinstance(node, Neg):
        return -evaluate(node.operand, env, params)
    if isinstance(node, Call):
        return J.FUNCTIONS[node.func](evaluate(node.arg, env, params))
    a = evaluate(node.left, env, params)
    b = evaluate(node.right, env, params)
    if node.op == "^" and not isinstance(a, J.Jet) and not isinstance(b, J.Jet):
        return J.power(a, b)
    return _BINARY[node.op](a, b)


def _check_bindings(e: Expr, assignment, params):
    missing = [v for v in e.signature if v not in assignment]
    if missing:
        raise UnknownSymbol(missing[0])
    missing = [p for p in e.params if p not in params]
    if missing:
        raise UnknownSymbol(missing[0])


def eval_value(e: Expr, assignment: Mapping[str, float], params: Mapping[str, float] = {}) -> float:
    _check_bindings(e, assignment, params)
    return float(evaluate(e.tree, assignment, params))


def eval_jet2(e: Expr, assignment: Mapping[str, float], params: Mapping[str, float] = {}) -> J.Jet:
    """Value, gradient and Hessian over ``e.signature`` (in signature order)."""
    _check_bindings(e, assignment, params)
    point = [float(assignment[v]) for v in e.signature]
    env = dict(zip(e.signature, J.seed(point)))
    out = evaluate(e.tree, env, params)
    if not isinstance(out, J.Jet):
        out = J.Jet.constant(out, len(point))
    return out


def as_function(e: Expr, params: Mapping[str, float]):
    """Turn ``e`` into a callable taking its variables positionally (floats or jets)."""
    _check_bindings(e, dict.fromkeys(e.signature, 0.0), params)
    names = e.signature
    bound = {k: float(v) for k, v in params.items()}

    def fn(args):
        return evaluate(e.tree, dict(zip(names, args)), bound)

    return fn


def signature_for(kind: str, n: int) -> tuple:
    """Variable names of a section of the given kind over an n-dimensional base."""
    xs = [f"x{i}" for i in range(1, n + 1)]
    if kind == "hamiltonian":
        return tuple(xs + [f"p{i}" for i in range(1, n + 1)] + ["z"])
    if kind == "lagrangian":
        return tuple(xs + [f"xd{i}" for i in range(1, n + 1)] + ["t"])
    if kind == "herglotz":
        return tuple(xs + [f"xd{i}" for i in range(1, n + 1)] + ["z"])
    raise ValueError(f"unknown section kind {kind!r}")

