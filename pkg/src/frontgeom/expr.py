"""Parser and evaluator for textual surface parametrizations.

A surface is written as a parenthesized triple of expressions in ``u`` and
``v``::

    (u, v, (1/2)*u^2 + u^4 + u^3*v)

Precedence, loosest first: ``+ -``, ``* /``, unary ``-``, ``^``.  ``^`` is
right-associative and takes integer exponents only.  Functions: sqrt, sin,
cos, exp, log.  The constant ``pi`` is predefined.  Juxtaposition is not
multiplication.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .jets import DEFAULT_ORDER, Jet, JetDomainError, JetVec3

FUNCTIONS = ("sqrt", "sin", "cos", "exp", "log")
VARIABLES = ("u", "v")
CONSTANTS = {"pi": math.pi}


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ArityError(ExprError):
    pass


class DomainError(ExprError):
    """Evaluation left the domain of an elementary function."""

    def __init__(self, message: str, subtree: "Node"):
        super().__init__(f"{message} in {to_string(subtree)}")
        self.subtree = subtree


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
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
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class SurfaceExpr:
    components: tuple[Node, Node, Node]

    def __post_init__(self):
        if len(self.components) != 3:
            raise ArityError(f"a surface needs 3 components, got {len(self.components)}")
        for c in self.components:
            bad = free_variables(c) - set(VARIABLES)
            if bad:
                raise ExprError(f"unknown variables {sorted(bad)}")

    def __str__(self) -> str:
        return to_string(self)

    def evaluate(self, point) -> tuple[float, float, float]:
        return tuple(eval_scalar(c, point) for c in self.components)

    def jets(self, point, order: int = DEFAULT_ORDER) -> JetVec3:
        return lift_surface(self, point, order)


# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, tok, pos = self.next()
        if tok != value or kind != "op":
            found = "end of input" if kind == "end" else repr(tok)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def at_op(self, *values: str) -> bool:
        kind, tok, _ = self.peek()
        return kind == "op" and tok in values

    def surface(self) -> SurfaceExpr:
        kind, tok, pos = self.peek()
        if not self.at_op("("):
            raise ParseError("a surface must start with '('", pos)
        self.next()
        comps = [self.expr()]
        while self.at_op(","):
            self.next()
            comps.append(self.expr())
        self.expect(")")
        kind, tok, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {tok!r}", pos)
        if len(comps) != 3:
            raise ArityError(f"a surface needs 3 components, got {len(comps)}")
        return SurfaceExpr(tuple(comps))

    def single(self) -> Node:
        node = self.expr()
        kind, tok, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {tok!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.next()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.at_op("-"):
            self.next()
            return Neg(self.unary())
        if self.at_op("+"):
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.at_op("^"):
            pos = self.next()[2]
            exponent = self.unary()
            try:
                value = eval_scalar(exponent, (0.0, 0.0))
            except ExprError:
                value = None
            if free_variables(exponent) or value is None or value != int(value):
                raise ParseError("exponent must be a constant integer", pos)
            return Pow(base, int(value))
        return base

    def atom(self) -> Node:
        kind, tok, pos = self.next()
        if kind == "num":
            return Const(float(tok))
        if kind == "name":
            if self.at_op("("):
                if tok not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok!r}", pos)
                self.next()
                arg = self.expr()
                self.expect(")")
                return Call(tok, arg)
            if tok in VARIABLES:
                return Var(tok)
            if tok in CONSTANTS:
                return Const(CONSTANTS[tok])
            if tok in FUNCTIONS:
                raise ParseError(f"function {tok!r} needs an argument", pos)
            raise ParseError(f"unknown identifier {tok!r}", pos)
        if kind == "op" and tok == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(tok)
        raise ParseError(f"unexpected {found}", pos)


def parse_surface(text: str) -> SurfaceExpr:
    """Parse ``"(x(u,v), y(u,v), z(u,v))"`` into a :class:`SurfaceExpr`."""
    return _Parser(text).surface()


def parse_expr(text: str) -> Node:
    return _Parser(text).single()


# -- printing -----------------------------------------------------------------

def _fmt_const(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_string(node) -> str:
    if isinstance(node, SurfaceExpr):
        return "(" + ", ".join(to_string(c) for c in node.components) + ")"
    if isinstance(node, Const):
        s = _fmt_const(abs(node.value))
        return s if node.value >= 0 else f"(-{s})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_string(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_string(node.left)} {node.op} {to_string(node.right)})"
    if isinstance(node, Pow):
        e = str(node.exponent) if node.exponent >= 0 else f"(-{-node.exponent})"
        return f"{to_string(node.base)}^{e}"
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def free_variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, (Neg,)):
        return free_variables(node.operand)
    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Pow):
        return free_variables(node.base)
    if isinstance(node, Call):
        return free_variables(node.arg)
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation ---------------------------------------------------------------

def _scalar_call(func: str, x: float, node: Node) -> float:
    if func == "sqrt":
        if x < 0:
            raise DomainError("sqrt of negative value", node)
        return math.sqrt(x)
    if func == "log":
        if x <= 0:
            raise DomainError("log of non-positive value", node)
        return math.log(x)
    return getattr(math, func)(x)


def eval_scalar(node: Node, point) -> float:
    """Evaluate ``node`` at ``point = (u, v)``."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return float(point[0] if node.name == "u" else point[1])
    if isinstance(node, Neg):
        return -eval_scalar(node.operand, point)
    if isinstance(node, BinOp):
        a = eval_scalar(node.left, point)
        b = eval_scalar(node.right, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise DomainError("division by zero", node)
        return a / b
    if isinstance(node, Pow):
        a = eval_scalar(node.base, point)
        if a == 0.0 and node.exponent < 0:
            raise DomainError("negative power of zero", node)
        return a ** node.exponent
    if isinstance(node, Call):
        return _scalar_call(node.func, eval_scalar(node.arg, point), node)
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet(node: Node, base, order: int = DEFAULT_ORDER) -> Jet:
    """Lift ``node`` to its order-``order`` jet at ``base``."""
    base = (float(base[0]), float(base[1]))
    return _eval_jet(node, base, order)


def _eval_jet(node: Node, base, order: int) -> Jet:
    if isinstance(node, Const):
        return Jet.constant(node.value, base, order)
    if isinstance(node, Var):
        return Jet.variable(node.name, base, order)
    if isinstance(node, Neg):
        return -_eval_jet(node.operand, base, order)
    try:
        if isinstance(node, BinOp):
            a = _eval_jet(node.left, base, order)
            b = _eval_jet(node.right, base, order)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b.value == 0.0:
                raise DomainError("division by zero", node)
            return a / b
        if isinstance(node, Pow):
            a = _eval_jet(node.base, base, order)
            if node.exponent < 0 and a.value == 0.0:
                raise DomainError("negative power of zero", node)
            return a.pow_int(node.exponent)
        if isinstance(node, Call):
            a = _eval_jet(node.arg, base, order)
            if node.func == "sqrt" and a.value <= 0.0:
                # sqrt at 0 has no Taylor expansion
                raise DomainError("sqrt of non-positive value", node)
            if node.func == "log" and a.value <= 0.0:
                raise DomainError("log of non-positive value", node)
            return getattr(a, node.func)()
    except JetDomainError as exc:
        raise DomainError(str(exc), node) from exc
    raise TypeError(f"not an expression node: {node!r}")


def lift_surface(s: SurfaceExpr, point, order: int = DEFAULT_ORDER) -> JetVec3:
    """Jets of all three components of ``s`` at ``point``."""
    return JetVec3(*(eval_jet(c, point, order) for c in s.components))
