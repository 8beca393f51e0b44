"""Text form of weights.

Grammar (whitespace is insignificant)::

    weight   := piece (";" piece)*
    piece    := expr "on" interval
    expr     := term ("+" term)*
    term     := [coeff "*"] atom
    atom     := "1" | "x^" num | "|x-" num "|^" num | "exp(" num "x)"
    interval := "(" num "," num ")"

``x^a`` is ``|x|^a``.  Accepted shorthands: a bare number for a constant,
``|x+c|^a`` for ``|x-(-c)|^a``, ``exp(x)`` and ``exp(-x)``.

>>> format_weight(parse_weight("2*x^0.5 on (0, 1); 2 on (1,3)"))
'2*x^0.5 on (0,1); 2 on (1,3)'
"""

from __future__ import annotations

import re

from .primitives import CONSTANT, EXPONENTIAL, POWER, Primitive
from .weights import Piece, Weight, _merge_terms

__all__ = ["ParseError", "parse_weight", "format_weight", "format_number"]

_NUM = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, lit: str) -> bool:
        self.skip()
        return self.text.startswith(lit, self.pos)

    def eat(self, lit: str):
        if not self.peek(lit):
            raise ParseError(f"expected {lit!r}", self.pos)
        self.pos += len(lit)

    def number(self) -> float:
        self.skip()
        m = _NUM.match(self.text, self.pos)
        if not m:
            raise ParseError("expected a number", self.pos)
        self.pos = m.end()
        return float(m.group())

    def weight(self) -> Weight:
        pieces = [self.piece()]
        while self.peek(";"):
            self.eat(";")
            pieces.append(self.piece())
        self.skip()
        if self.pos != len(self.text):
            raise ParseError("unexpected trailing input", self.pos)
        for p, q in zip(pieces, pieces[1:]):
            if q.a < p.b:
                raise ParseError(f"overlapping pieces ({p.a},{p.b}) and ({q.a},{q.b})", self.pos)
        try:
            return Weight(tuple(pieces))
        except ValueError as exc:
            raise ParseError(str(exc), self.pos) from None

    def piece(self) -> Piece:
        start = self.pos
        terms = [self.term()]
        while self.peek("+"):
            self.eat("+")
            terms.append(self.term())
        self.eat("on")
        self.eat("(")
        a = self.number()
        self.eat(",")
        b = self.number()
        self.eat(")")
        if not a < b:
            raise ParseError(f"empty interval ({a},{b})", start)
        return Piece(a, b, _merge_terms(terms))

    def term(self) -> Primitive:
        self.skip()
        start = self.pos
        if _NUM.match(self.text, self.pos):
            c = self.number()
            if c <= 0:
                raise ParseError("coefficient must be positive", start)
            if self.peek("*"):
                self.eat("*")
                return self.atom().scaled(c)
            return Primitive(CONSTANT, c)
        return self.atom()

    def atom(self) -> Primitive:
        if self.peek("x^"):
            self.eat("x^")
            return Primitive(POWER, 1.0, 0.0, self.number())
        if self.peek("|x"):
            self.eat("|x")
            self.skip()
            sign = self.text[self.pos : self.pos + 1]
            if sign not in ("-", "+"):
                raise ParseError("expected '-' or '+'", self.pos)
            self.pos += 1
            c = self.number()
            self.eat("|^")
            return Primitive(POWER, 1.0, c if sign == "-" else -c, self.number())
        if self.peek("exp("):
            self.eat("exp(")
            if self.peek("x"):
                beta = 1.0
            elif self.peek("-x"):
                self.eat("-")
                beta = -1.0
            else:
                beta = self.number()
            self.eat("x")
            self.eat(")")
            return Primitive(EXPONENTIAL, 1.0, 0.0, beta)
        raise ParseError("expected a weight atom", self.pos)


def parse_weight(text: str) -> Weight:
    return _Parser(text).weight()


def format_number(x: float) -> str:
    s = repr(float(x) + 0.0)
    return s[:-2] if s.endswith(".0") else s


def _format_term(t: Primitive) -> str:
    if t.kind == CONSTANT:
        return format_number(t.coefficient)
    if t.kind == POWER:
        e = format_number(t.exponent)
        if t.center == 0.0:
            atom = f"x^{e}"
        elif t.center > 0:
            atom = f"|x-{format_number(t.center)}|^{e}"
        else:
            atom = f"|x+{format_number(-t.center)}|^{e}"
    else:
        atom = f"exp({format_number(t.exponent)}x)"
    if t.coefficient == 1.0:
        return atom
    return f"{format_number(t.coefficient)}*{atom}"


def format_weight(w: Weight) -> str:
    """Inverse of :func:`parse_weight`; periodic weights print one period."""
    return "; ".join(
        f"{' + '.join(_format_term(t) for t in p.terms)} on ({format_number(p.a)},{format_number(p.b)})"
        for p in w.pieces
    )
