"""Recursive-descent parser for the scalar expression language.

Grammar (EBNF)::

    expr     = term , { ( "+" | "-" ) , term } ;
    term     = unary , { ( "*" | "/" ) , unary } ;
    unary    = ( "-" | "+" ) , unary | power ;
    power    = atom , [ ( "^" | "**" ) , unary ] ;
    atom     = number | call | identifier | "(" , expr , ")" ;
    call     = function , "(" , expr , ")" ;
    function = "exp" | "log" | "sin" | "cos" | "tan" | "arcsin" | "arctan" | "sqrt" ;
    number   = digits , [ "." , digits ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digits ] ;

Exponents must reduce to an integer constant.  Decimal literals are read as
exact rationals (``0.5`` is ``1/2``).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from .nodes import FUNCTIONS, Const, Expr, ExprError, Sym, add, div, func, mul, neg, power


class ParseError(ExprError, ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.message = message
        self.text = text
        self.pos = pos


class _Tok(NamedTuple):
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            toks.append(_Tok("op" if kind == "op" else kind, "^" if value == "**" else value, pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        return ParseError(msg, self.text, (tok or self.tok).pos)

    def take(self, value: str) -> bool:
        if self.tok.kind == "op" and self.tok.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.take(value):
            found = self.tok.value or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.value!r}")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            if self.take("+"):
                terms.append(self.term())
            elif self.take("-"):
                terms.append(neg(self.term()))
            else:
                return add(*terms)

    def term(self) -> Expr:
        e = self.unary()
        while True:
            tok = self.tok
            if self.take("*"):
                e = mul(e, self.unary())
            elif self.take("/"):
                d = self.unary()
                if d.is_zero:
                    raise self.error("division by zero", tok)
                e = div(e, d)
            else:
                return e

    def unary(self) -> Expr:
        if self.take("-"):
            return neg(self.unary())
        if self.take("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.tok
        if self.take("^"):
            ex = self.unary()
            if not isinstance(ex, Const) or ex.value.denominator != 1:
                raise self.error("exponent must be an integer constant", tok)
            if base.is_zero and ex.value < 0:
                raise self.error("division by zero", tok)
            return power(base, int(ex.value))
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(Fraction(tok.value))
        if tok.kind == "name":
            self.i += 1
            if self.tok.kind == "op" and self.tok.value == "(":
                if tok.value not in FUNCTIONS:
                    raise self.error(f"unknown function {tok.value!r}", tok)
                self.i += 1
                arg = self.expr()
                self.expect(")")
                return func(tok.value, arg)
            if tok.value in FUNCTIONS:
                raise self.error(f"function {tok.value!r} needs an argument", tok)
            return Sym(tok.value)
        if self.take("("):
            e = self.expr()
            self.expect(")")
            return e
        found = tok.value or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into a canonical :class:`Expr`."""
    if not isinstance(text, str):
        raise TypeError("parse_expr expects a string")
    return _Parser(text).parse()
