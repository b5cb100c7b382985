# surfaces/surface_dsl.py
"""
Surface definition files and the expression language of their components.

Grammar (precedence high → low, binary operators left-associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?        # exponent must fold to a constant
    primary := NUMBER | 'u' | 'v' | 'pi' | 'e'
             | FUNC '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-u^2`` is ``-(u^2)``; a chain
``a^b^c`` nests to the right because the exponent is itself a unary.

Surface file (UTF-8, ``key = value``; ``#`` starts a comment)::

    name        = "example-r5"
    ambient_dim = 5
    component   = "u^2*v^2"
    ...
    u_range     = -1.5 1.5
    v_range     = -1.5 1.5
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .exceptions import DimensionError, ParseError, UnknownIdentifier
from .jets import Jet3

logger = logging.getLogger(__name__)

AMBIENT_DIMS = (3, 4, 5)
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("u", "v")
BINARY_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}
_OP_SYMBOL = {v: k for k, v in BINARY_OPS.items()}


# =========================
# Expression tree
# =========================
@dataclass(frozen=True)
class ExprNode:
    kind: str  # constant | variable | unary | binary | power
    op: Optional[str] = None  # unary: neg/sin/...; binary: add/sub/mul/div
    value: Optional[float] = None  # constant value or power exponent
    name: Optional[str] = None  # variable name, or "pi"/"e" for named constants
    children: tuple["ExprNode", ...] = field(default_factory=tuple)

    # ----- constructors -----
    @staticmethod
    def constant(value: float, name: Optional[str] = None) -> "ExprNode":
        return ExprNode("constant", value=float(value), name=name)

    @staticmethod
    def variable(name: str) -> "ExprNode":
        return ExprNode("variable", name=name)

    @staticmethod
    def unary(op: str, child: "ExprNode") -> "ExprNode":
        return ExprNode("unary", op=op, children=(child,))

    @staticmethod
    def binary(op: str, left: "ExprNode", right: "ExprNode") -> "ExprNode":
        return ExprNode("binary", op=op, children=(left, right))

    @staticmethod
    def power(base: "ExprNode", exponent: float) -> "ExprNode":
        return ExprNode("power", value=float(exponent), children=(base,))

    # ----- queries -----
    def free_variables(self) -> set[str]:
        if self.kind == "variable":
            return {self.name}
        out: set[str] = set()
        for c in self.children:
            out |= c.free_variables()
        return out

    def is_constant(self) -> bool:
        return not self.free_variables()

    def __str__(self) -> str:
        return pretty_print(self)


def pretty_print(node: ExprNode) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if node.kind == "constant":
        return node.name if node.name else repr(node.value)
    if node.kind == "variable":
        return node.name
    if node.kind == "unary":
        inner = pretty_print(node.children[0])
        if node.op == "neg":
            return f"(-{inner})"
        return f"{node.op}({inner})"
    if node.kind == "binary":
        left, right = (pretty_print(c) for c in node.children)
        return f"({left}{_OP_SYMBOL[node.op]}{right})"
    if node.kind == "power":
        base = pretty_print(node.children[0])
        return f"({base}^({node.value!r}))"
    raise ValueError(f"unknown node kind {node.kind!r}")


# =========================
# Tokenizer + recursive descent parser
# =========================
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    column: int  # 1-based


def _tokenize(text: str) -> Iterator[_Token]:
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line=1, column=pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            yield _Token(kind, m.group(), pos + 1)
        pos = m.end()
    yield _Token("end", "", len(text) + 1)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, line=1, column=tok.column)

    def expect(self, text: str) -> _Token:
        if self.tok.text != text:
            found = self.tok.text or "end of expression"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self) -> ExprNode:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> ExprNode:
        left = self.term()
        while self.tok.text in ("+", "-"):
            op = BINARY_OPS[self.advance().text]
            left = ExprNode.binary(op, left, self.term())
        return left

    def term(self) -> ExprNode:
        left = self.unary()
        while self.tok.text in ("*", "/"):
            op = BINARY_OPS[self.advance().text]
            left = ExprNode.binary(op, left, self.unary())
        return left

    def unary(self) -> ExprNode:
        if self.tok.text == "-":
            self.advance()
            return ExprNode.unary("neg", self.unary())
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> ExprNode:
        base = self.primary()
        if self.tok.text == "^":
            caret = self.advance()
            exponent = self.unary()
            if not exponent.is_constant():
                raise self.error("exponent must be a constant", caret)
            with np.errstate(all="ignore"):
                value = float(evaluate_value(exponent, 0.0, 0.0))
            if not math.isfinite(value):
                raise self.error(f"exponent folds to {value!r}, not a finite number", caret)
            base = ExprNode.power(base, value)
        return base

    def primary(self) -> ExprNode:
        tok = self.tok
        if tok.kind == "number":
            value = float(tok.text)
            if not math.isfinite(value):
                raise self.error(f"number {tok.text!r} overflows", tok)
            self.advance()
            return ExprNode.constant(value)
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name in VARIABLES:
                return ExprNode.variable(name)
            if name in CONSTANTS:
                return ExprNode.constant(CONSTANTS[name], name=name)
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ExprNode.unary(name, arg)
            raise UnknownIdentifier(f"unknown identifier {name!r}", line=1, column=tok.column)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of expression"
        raise self.error(f"unexpected {found!r}")


def parse_expression(text: str) -> ExprNode:
    return _Parser(text).parse()


# =========================
# Evaluation
# =========================
_VALUE_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


def evaluate_jet(node: ExprNode, u: Jet3, v: Jet3) -> Jet3:
    kind = node.kind
    if kind == "constant":
        return Jet3.constant(np.full(u.shape, node.value))
    if kind == "variable":
        return u if node.name == "u" else v
    if kind == "unary":
        arg = evaluate_jet(node.children[0], u, v)
        return -arg if node.op == "neg" else getattr(arg, node.op)()
    if kind == "binary":
        a = evaluate_jet(node.children[0], u, v)
        b = evaluate_jet(node.children[1], u, v)
        if node.op == "add":
            return a + b
        if node.op == "sub":
            return a - b
        if node.op == "mul":
            return a * b
        return a / b
    if kind == "power":
        return evaluate_jet(node.children[0], u, v).power(node.value)
    raise ValueError(f"unknown node kind {kind!r}")


def evaluate_value(node: ExprNode, u, v):
    """Plain floating-point evaluation (no derivatives)."""
    kind = node.kind
    if kind == "constant":
        return node.value + 0.0 * np.asarray(u, dtype=float)
    if kind == "variable":
        return np.asarray(u if node.name == "u" else v, dtype=float)
    if kind == "unary":
        arg = evaluate_value(node.children[0], u, v)
        return -arg if node.op == "neg" else _VALUE_FUNCS[node.op](arg)
    if kind == "binary":
        a = evaluate_value(node.children[0], u, v)
        b = evaluate_value(node.children[1], u, v)
        return {"add": np.add, "sub": np.subtract, "mul": np.multiply, "div": np.divide}[node.op](a, b)
    if kind == "power":
        return np.power(evaluate_value(node.children[0], u, v), node.value)
    raise ValueError(f"unknown node kind {kind!r}")


# =========================
# Charts
# =========================
@dataclass(frozen=True)
class SurfaceChart:
    name: str
    ambient_dim: int
    components: tuple[ExprNode, ...]
    domain: tuple[float, float, float, float]  # u_min, u_max, v_min, v_max

    def __post_init__(self):
        if self.ambient_dim not in AMBIENT_DIMS:
            raise DimensionError(f"ambient_dim must be one of {AMBIENT_DIMS}, got {self.ambient_dim}")
        if len(self.components) != self.ambient_dim:
            raise DimensionError(
                f"{len(self.components)} components given but ambient_dim is {self.ambient_dim}"
            )
        for c in self.components:
            extra = c.free_variables() - set(VARIABLES)
            if extra:
                raise UnknownIdentifier(f"unknown identifiers {sorted(extra)}")
        u0, u1, v0, v1 = self.domain
        if not (u0 < u1 and v0 < v1):
            raise ParseError(f"empty parameter domain {self.domain}")

    @classmethod
    def from_expressions(
        cls,
        name: str,
        expressions: Sequence[Union[str, ExprNode]],
        domain: Sequence[float] = (-1.0, 1.0, -1.0, 1.0),
    ) -> "SurfaceChart":
        nodes = tuple(e if isinstance(e, ExprNode) else parse_expression(e) for e in expressions)
        return cls(name, len(nodes), nodes, tuple(float(x) for x in domain))

    @property
    def u_range(self) -> tuple[float, float]:
        return self.domain[0], self.domain[1]

    @property
    def v_range(self) -> tuple[float, float]:
        return self.domain[2], self.domain[3]

    def contains(self, u: float, v: float) -> bool:
        u0, u1, v0, v1 = self.domain
        return u0 <= u <= u1 and v0 <= v <= v1

    def jet(self, u0: float, v0: float) -> Jet3:
        """Ambient vector jet (shape (n,)) of the chart at (u0, v0)."""
        return Jet3.stack(eval_chart(self, u0, v0))

    def values(self, u, v) -> np.ndarray:
        return np.stack([np.asarray(evaluate_value(c, u, v), dtype=float) for c in self.components], axis=-1)

    def to_text(self) -> str:
        lines = [f'name        = "{self.name}"', f"ambient_dim = {self.ambient_dim}"]
        lines += [f'component   = "{pretty_print(c)}"' for c in self.components]
        lines.append(f"u_range     = {self.domain[0]!r} {self.domain[1]!r}")
        lines.append(f"v_range     = {self.domain[2]!r} {self.domain[3]!r}")
        return "\n".join(lines) + "\n"


def eval_chart(chart: SurfaceChart, u0: float, v0: float) -> list[Jet3]:
    if not chart.contains(u0, v0):
        logger.warning("evaluating %s outside its domain at (%g, %g)", chart.name, u0, v0)
    u = Jet3.variable("u", u0)
    v = Jet3.variable("v", v0)
    return [evaluate_jet(c, u, v) for c in chart.components]


# =========================
# Surface files
# =========================
_KNOWN_KEYS = ("name", "ambient_dim", "component", "u_range", "v_range")
_SINGLE_KEYS = ("name", "ambient_dim", "u_range", "v_range")
_LINE_RE = re.compile(r"^\s*(?P<key>[A-Za-z_][A-Za-z_0-9]*)\s*=\s*(?P<value>.*?)\s*$")


def _unquote(raw: str, line_no: int, column: int) -> tuple[str, int]:
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1], column + 1
    raise ParseError("expected a quoted string", line=line_no, column=column)


def _parse_range(raw: str, line_no: int, column: int) -> tuple[float, float]:
    parts = raw.split()
    if len(parts) != 2:
        raise ParseError("a range needs two numbers", line=line_no, column=column)
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ParseError("range bounds must be numbers", line=line_no, column=column) from None
    if not lo < hi:
        raise ParseError("range lower bound must be below the upper bound", line=line_no, column=column)
    return lo, hi


def parse_surface(text: str) -> SurfaceChart:
    name = "surface"
    ambient_dim: Optional[int] = None
    components: list[ExprNode] = []
    u_range = (-1.0, 1.0)
    v_range = (-1.0, 1.0)
    seen: dict[str, int] = {}

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(line)
        if not stripped.strip():
            continue
        m = _LINE_RE.match(stripped)
        if not m:
            raise ParseError("expected 'key = value'", line=line_no, column=1)
        key, raw = m.group("key"), m.group("value")
        column = m.start("value") + 1
        if key not in _KNOWN_KEYS:
            raise ParseError(f"unknown key {key!r}", line=line_no, column=m.start("key") + 1)
        if key in _SINGLE_KEYS and key in seen:
            raise ParseError(f"duplicate key {key!r} (first set on line {seen[key]})", line=line_no, column=m.start("key") + 1)
        seen.setdefault(key, line_no)

        if key == "name":
            name, _ = _unquote(raw, line_no, column)
        elif key == "ambient_dim":
            try:
                ambient_dim = int(raw)
            except ValueError:
                raise ParseError("ambient_dim must be an integer", line=line_no, column=column) from None
        elif key == "component":
            expr_text, offset = _unquote(raw, line_no, column)
            try:
                components.append(parse_expression(expr_text))
            except ParseError as e:
                col = (e.column or 1) - 1 + offset
                raise type(e)(e.message, line=line_no, column=col) from None
        elif key == "u_range":
            u_range = _parse_range(raw, line_no, column)
        elif key == "v_range":
            v_range = _parse_range(raw, line_no, column)

    if ambient_dim is None:
        raise ParseError("missing ambient_dim")
    if ambient_dim not in AMBIENT_DIMS:
        raise DimensionError(f"ambient_dim must be one of {AMBIENT_DIMS}, got {ambient_dim}")
    if len(components) != ambient_dim:
        raise DimensionError(f"{len(components)} components given but ambient_dim is {ambient_dim}")
    return SurfaceChart(name, ambient_dim, tuple(components), (*u_range, *v_range))


def _strip_comment(line: str) -> str:
    # '#' inside quotes is kept
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


def load_surface(path: Union[str, Path]) -> SurfaceChart:
    text = Path(path).read_text(encoding="utf-8")
    return parse_surface(text)
