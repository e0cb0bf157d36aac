"""Recursive-descent parser for the expression grammar.

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' exponent)?
    base     := number | 'i' | identifier | call | '(' expr ')' | '-' factor
    call     := ('exp'|'log'|'sqrt'|'conj') '(' expr ')'
    exponent := ['-'] integer | '(' ['-'] integer ['/' ['-'] integer] ')'

Whitespace is insignificant and '#' comments run to end of line.  Built-in
aliases: z1 = x1 + i*x2, z2 = x3 + i*x4, z1b/z2b their conjugates, v = 2*x1.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from . import expr as E

__all__ = ["ParseError", "parse_expression", "ALIASES"]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


_z1 = E.add(E.coord(1), E.mul(E.I, E.coord(2)))
_z2 = E.add(E.coord(3), E.mul(E.I, E.coord(4)))

ALIASES: dict[str, E.Expr] = {
    "x1": E.coord(1),
    "x2": E.coord(2),
    "x3": E.coord(3),
    "x4": E.coord(4),
    "z1": _z1,
    "z2": _z2,
    "z1b": E.conjugate(_z1),
    "z2b": E.conjugate(_z2),
    "v": E.mul(E.const(2), E.coord(1)),
    "i": E.I,
}

_FUNCS = {
    "exp": E.exp,
    "log": E.log,
    "sqrt": E.sqrt,
    "conj": E.conjugate,
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, names: Mapping[str, E.Expr]):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0
        self.names = names

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value:
            self.fail(f"expected {value!r}", tok)
        return tok

    def fail(self, msg: str, tok):
        found = tok[1] or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok[2], self.text)

    def parse(self) -> E.Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail("unexpected token", tok)
        return e

    def expr(self) -> E.Expr:
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else E.neg(t))
        return E.add(*terms) if len(terms) > 1 else terms[0]

    def term(self) -> E.Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            f = self.factor()
            e = E.mul(e, f) if op == "*" else E.div(e, f)
        return e

    def factor(self) -> E.Expr:
        b = self.base()
        if self.peek()[1] == "^":
            self.take()
            b = E.pow_(b, self.exponent())
        return b

    def _signed_int(self) -> int:
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "num" or not tok[1].isdigit():
            self.fail("expected an integer exponent", tok)
        return sign * int(tok[1])

    def exponent(self) -> Fraction:
        if self.peek()[1] == "(":
            self.take()
            num = self._signed_int()
            den = 1
            if self.peek()[1] == "/":
                self.take()
                den = self._signed_int()
                if den == 0:
                    self.fail("zero denominator in exponent", self.toks[self.k - 1])
            self.expect(")")
            return Fraction(num, den)
        return Fraction(self._signed_int())

    def base(self) -> E.Expr:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return E.const(Fraction(val))
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if val == "-":
            return E.neg(self.factor())
        if kind == "name":
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[val](arg)
            if val in self.names:
                return self.names[val]
            raise ParseError(f"unknown identifier {val!r}", pos, self.text)
        self.fail("expected an operand", tok)


def parse_expression(
    text: str,
    known_parameters: Iterable[str] = (),
    aliases: Mapping[str, E.Expr] | None = None,
) -> E.Expr:
    """Parse ``text`` into an expression.

    ``known_parameters`` are names of real parameters (e.g. ``phi``);
    ``aliases`` adds extra named subexpressions on top of the built-ins.
    """
    names: dict[str, E.Expr] = dict(ALIASES)
    for p in known_parameters:
        if p in names or p in _FUNCS:
            raise ValueError(f"parameter name {p!r} shadows a built-in")
        names[p] = E.param(p)
    if aliases:
        names.update(aliases)
    return _Parser(text, names).parse()
