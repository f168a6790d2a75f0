"""Recursive-descent parser for polynomial expressions such as
``X1*X2 - 2*(Q1 + X3)^2``.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" INT)?
    atom   := IDENT | INT | "(" expr ")"

Identifiers are ``X1..Xn`` and ``Q1..Qn``.
"""

from __future__ import annotations

import re

from .polyring import Polynomial, PolyError, VarUniverse

__all__ = ["ParseError", "parse_polynomial"]


class ParseError(PolyError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} at column {pos + 1}")
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, U: VarUniverse):
        self.toks = _tokenize(text)
        self.i = 0
        self.U = U

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            raise ParseError(f"expected {value!r} at column {pos + 1}, got {v or 'end of input'!r}")

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            p = p + rhs if op == "+" else p - rhs
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek()[1] == "*":
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, v, pos = self.take()
            if kind != "int":
                raise ParseError(f"exponent must be a nonnegative integer at column {pos + 1}")
            base = base ** int(v)
        return base

    def atom(self) -> Polynomial:
        kind, v, pos = self.take()
        if kind == "int":
            return self.U.const(int(v))
        if kind == "ident":
            if not re.fullmatch(r"[XQ][1-9]\d*", v):
                raise ParseError(f"unknown identifier {v!r} at column {pos + 1}")
            try:
                return self.U.var(self.U.var_id(v))
            except PolyError as exc:
                raise ParseError(str(exc)) from None
        if v == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected {v or 'end of input'!r} at column {pos + 1}")


def parse_polynomial(text: str, n: int) -> Polynomial:
    parser = _Parser(text, VarUniverse(n))
    p = parser.expr()
    kind, v, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {v!r} at column {pos + 1}")
    return p
