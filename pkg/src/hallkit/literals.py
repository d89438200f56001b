"""
Parser for Hall element literals such as ``"1*[1.0#0] - (q-1)*[0.1#0]"``.

Grammar (linear combinations only)::

    expr   := term (('+' | '-') term)*
    term   := ['-'] factor ('*' factor | '/' factor)*
    factor := NUMBER | 'q' | '[' CLASS_ID ']' | '(' expr ')' | factor '^' INT

Every term may contain at most one class id; a term without one is a scalar
and is only allowed inside parentheses.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .hall import HallElement
from .repcat import parse_class_id

_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\[[^\]]*\])|([-+*/^()]))")


class LiteralError(ValueError):
    pass


def _tokenize(s: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise LiteralError(f"unexpected character at position {pos}: {s[pos:pos + 8]!r}")
        num, q, cid, op = m.groups()
        if num:
            out.append(("num", num))
        elif q:
            out.append(("q", q))
        elif cid:
            out.append(("cid", cid))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    """Values are dicts {class_id or None: Fraction}; None is the scalar part."""

    def __init__(self, tokens, q: int):
        self.toks = tokens
        self.i = 0
        self.q = q

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, val=None):
        tok = self.peek()
        if val is not None and tok[1] != val:
            raise LiteralError(f"expected {val!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> dict:
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            sign = 1 if op == "+" else -1
            for k, v in rhs.items():
                acc[k] = acc.get(k, 0) + sign * v
        return acc

    def term(self) -> dict:
        neg = False
        while self.peek()[1] in ("-", "+"):
            neg ^= self.take()[1] == "-"
        val = self.power()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.power()
            val = _mul(val, rhs) if op == "*" else _div(val, rhs)
        if neg:
            val = {k: -v for k, v in val.items()}
        return val

    def power(self) -> dict:
        base = self.factor()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            kind, tok = self.take()
            if kind != "num":
                raise LiteralError("exponent must be an integer")
            if set(base) != {None}:
                raise LiteralError("only scalars can be raised to a power")
            e = int(tok) * (-1 if neg else 1)
            base = {None: base[None] ** e}
        return base

    def factor(self) -> dict:
        kind, tok = self.take()
        if kind == "num":
            return {None: Fraction(int(tok))}
        if kind == "q":
            return {None: Fraction(self.q)}
        if kind == "cid":
            try:
                return {parse_class_id(tok): Fraction(1)}
            except ValueError as exc:
                raise LiteralError(str(exc)) from None
        if tok == "(":
            v = self.expr()
            self.take(")")
            return v
        if tok == "-":
            return {k: -v for k, v in self.factor().items()}
        raise LiteralError(f"unexpected token {tok!r}")


def _mul(a: dict, b: dict) -> dict:
    if set(a) != {None} and set(b) != {None}:
        raise LiteralError("product of two class ids is not a linear literal")
    if set(a) == {None}:
        a, b = b, a
    c = b[None]
    return {k: v * c for k, v in a.items()}


def _div(a: dict, b: dict) -> dict:
    if set(b) != {None}:
        raise LiteralError("division by a class id")
    if b[None] == 0:
        raise LiteralError("division by zero")
    return {k: v / b[None] for k, v in a.items()}


def parse_element(s: str, q: int) -> HallElement:
    p = _Parser(_tokenize(s), q)
    if not p.toks:
        raise LiteralError("empty element literal")
    val = p.expr()
    if p.i != len(p.toks):
        raise LiteralError(f"trailing input at token {p.peek()[1]!r}")
    if val.get(None):
        raise LiteralError("element literal has a scalar term without a class id")
    val.pop(None, None)
    return HallElement(val)
