"""Expression language for the command line.

Grammar (ASCII, whitespace ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" exponent)?
    exponent:= INT | "(" "-"? INT ")"
    atom    := INT | "O" "(" INT ")" | NAME | "(" expr ")"
    NAME    := letter (letter | digit | "_")* "'"*

Names ``X1, X2, ...`` and ``t`` are variables; every other name is a field
generator (``u1``/``u2`` are re-read as series variables by the rank-two
commands).  ``O(d)`` declares that terms of degree ``>= d`` are unknown.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Tuple, Union


class ParseError(ValueError):
    def __init__(self, message: str, text: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"syntax error at line {line}, column {column}: {message}")


# ----------------------------------------------------------------------------
# AST
# ----------------------------------------------------------------------------

_VAR = re.compile(r"X[1-9][0-9]*$|t$")


@dataclass(frozen=True)
class Num:
    value: int
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Gen:
    name: str
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class BigO:
    order: int
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: int = field(default=0, compare=False, repr=False)


Node = Union[Num, Var, Gen, BigO, Neg, Pow, BinOp]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    if isinstance(node, Pow):
        return _POW_PREC
    return _ATOM_PREC


def to_text(node: Node) -> str:
    """Print with the fewest parentheses that parse back to the same tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, (Var, Gen)):
        return node.name
    if isinstance(node, BigO):
        return f"O({node.order})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-({inner})" if _prec(node.operand) < _NEG_PREC else f"-{inner}"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < _ATOM_PREC:
            base = f"({base})"
        exp = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        return f"{base}^{exp}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_text(node.left)
        if _prec(node.left) < p:
            left = f"({left})"
        right = to_text(node.right)
        if _prec(node.right) <= p:
            right = f"({right})"
        sep = " " if p == 1 else ""
        return f"{left}{sep}{node.op}{sep}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# ----------------------------------------------------------------------------
# tokenizer and parser
# ----------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>[0-9]+)|(?P<name>[A-Za-z][A-Za-z0-9_]*'*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise _error(text, pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _error(text: str, offset: int, message: str) -> ParseError:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return ParseError(message, text, line, column)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.open_parens: List[int] = []

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, offset=None):
        kind, value, pos = self.peek()
        if kind == "end" and self.open_parens:
            raise _error(self.text, self.open_parens[-1], "unclosed '('")
        raise _error(self.text, pos if offset is None else offset, message)

    def expect(self, value: str):
        kind, v, _ = self.peek()
        if kind != "op" or v != value:
            self.fail(f"expected {value!r}, found {v or 'end of input'!r}")
        return self.take()

    def open(self):
        _, _, pos = self.expect("(")
        self.open_parens.append(pos)

    def close(self):
        self.expect(")")
        self.open_parens.pop()

    def parse(self) -> Node:
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            self.fail(f"unexpected {v!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self) -> Node:
        kind, v, pos = self.peek()
        if kind == "op" and v == "-":
            self.take()
            return Neg(self.unary(), pos)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, v, pos = self.peek()
        if kind == "op" and v == "^":
            self.take()
            return Pow(base, self.exponent(), pos)
        return base

    def exponent(self) -> int:
        kind, v, pos = self.peek()
        if kind == "int":
            self.take()
            return int(v)
        if kind == "op" and v == "(":
            self.open()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, v, pos = self.peek()
            if kind != "int":
                self.fail("expected an integer exponent")
            self.take()
            self.close()
            return sign * int(v)
        self.fail("expected an integer exponent")

    def atom(self) -> Node:
        kind, v, pos = self.peek()
        if kind == "int":
            self.take()
            return Num(int(v), pos)
        if kind == "name":
            self.take()
            if v == "O" and self.peek()[:2] == ("op", "("):
                self.open()
                k, d, p = self.peek()
                if k != "int":
                    self.fail("expected an integer order in O(...)")
                self.take()
                self.close()
                return BigO(int(d), pos)
            if _VAR.match(v):
                return Var(v, pos)
            return Gen(v, pos)
        if kind == "op" and v == "(":
            self.open()
            node = self.expr()
            self.close()
            return node
        self.fail(f"unexpected {v or 'end of input'!r}")


def parse(text: str) -> Node:
    """Parse one expression; raises :class:`ParseError` with line and column."""
    return _Parser(text).parse()


def names_in(node: Node) -> List[str]:
    """Generator names in order of first appearance."""
    out: List[str] = []

    def walk(n):
        if isinstance(n, Gen):
            if n.name not in out:
                out.append(n.name)
        elif isinstance(n, (Neg,)):
            walk(n.operand)
        elif isinstance(n, Pow):
            walk(n.base)
        elif isinstance(n, BinOp):
            walk(n.left)
            walk(n.right)

    walk(node)
    return out
