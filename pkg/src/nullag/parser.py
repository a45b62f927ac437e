"""Recursive-descent parser for the ASCII expression grammar.

Grammar (ASCII only)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' rational)?
    base   := number | 'x' | "x'" | "x''" | "x'''" | 't'
            | ident '(' 't' ')' ("'")*          # opaque time-function
            | func '(' expr ')'                 # func in {exp, ln, sin, cos, abs}
            | '(' expr ')'
            | ident                             # named constant

A trailing run of apostrophes on an opaque function denotes its derivative
order.  Number literals (including decimals) parse to exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    APPLY_FUNCS,
    Const,
    ConstSym,
    Expr,
    FuncSym,
    JetSym,
    T,
    add,
    apply_fn,
    div,
    mul,
    pow_,
    sub,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass
class _Token:
    kind: str  # NUMBER | IDENT | APOS | OP
    text: str
    pos: int


_OPS = set("+-*/^()")

_JET_BY_PRIMES = {0: JetSym("x"), 1: JetSym("xdot"), 2: JetSym("xddot"), 3: JetSym("xdddot")}


def tokenize(text: str) -> list[_Token]:
    if not text.isascii():
        raise ParseError("only ASCII input is supported", 0)
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i + 1
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            if text[j - 1] == ".":
                raise ParseError("malformed number", i)
            tokens.append(_Token("NUMBER", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", text[i:j], i))
            i = j
            continue
        if c == "'":
            j = i + 1
            while j < n and text[j] == "'":
                j += 1
            tokens.append(_Token("APOS", text[i:j], i))
            i = j
            continue
        if c in _OPS:
            tokens.append(_Token("OP", c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.next()
        if tok.kind != "OP" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text!r}", tok.pos)
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "OP" and tok.text in ops

    def parse(self) -> Expr:
        e = self.parse_expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return e

    def parse_expr(self) -> Expr:
        negate = False
        if self.at_op("+", "-"):
            negate = self.next().text == "-"
        e = self.parse_term()
        if negate:
            e = mul(-1, e)
        while self.at_op("+", "-"):
            op = self.next().text
            rhs = self.parse_term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def parse_term(self) -> Expr:
        e = self.parse_factor()
        while self.at_op("*", "/"):
            op = self.next().text
            rhs = self.parse_factor()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def parse_factor(self) -> Expr:
        base = self.parse_base()
        if self.at_op("^"):
            self.next()
            q = self.parse_rational()
            return pow_(base, q)
        return base

    def parse_rational(self) -> Fraction:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected exponent", len(self.text))
        if tok.kind == "OP" and tok.text == "(":
            self.next()
            q = self._signed_rational(allow_slash=True)
            self.expect_op(")")
            return q
        # without parentheses only a plain (possibly negative) number binds
        # to the exponent; a following '/' belongs to the enclosing term
        return self._signed_rational(allow_slash=False)

    def _signed_rational(self, allow_slash: bool) -> Fraction:
        sign = 1
        if self.at_op("-"):
            self.next()
            sign = -1
        tok = self.next()
        if tok.kind != "NUMBER":
            raise ParseError("exponent must be rational", tok.pos)
        q = Fraction(tok.text)
        if allow_slash and self.at_op("/"):
            self.next()
            den = self.next()
            if den.kind != "NUMBER":
                raise ParseError("exponent must be rational", den.pos)
            q /= Fraction(den.text)
        return sign * q

    def parse_base(self) -> Expr:
        tok = self.next()
        if tok.kind == "NUMBER":
            return Const(Fraction(tok.text))
        if tok.kind == "OP" and tok.text == "(":
            e = self.parse_expr()
            self.expect_op(")")
            nxt = self.peek()
            if nxt is not None and nxt.kind == "APOS":
                raise ParseError("derivative marker may only follow x or an opaque function", nxt.pos)
            return e
        if tok.kind == "IDENT":
            return self.parse_ident(tok)
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)

    def parse_ident(self, tok: _Token) -> Expr:
        name = tok.text
        nxt = self.peek()
        if name == "x":
            order = 0
            if nxt is not None and nxt.kind == "APOS":
                order = len(self.next().text)
                if order > 3:
                    raise ParseError("malformed derivative marker: jets beyond x''' are not supported", tok.pos)
            return _JET_BY_PRIMES[order]
        if name == "t":
            return T
        if nxt is not None and nxt.kind == "OP" and nxt.text == "(":
            self.next()
            if name in APPLY_FUNCS:
                inner = self.parse_expr()
                self.expect_op(")")
                after = self.peek()
                if after is not None and after.kind == "APOS":
                    raise ParseError("derivative marker may only follow an opaque function of t", after.pos)
                return apply_fn(name, inner)
            arg = self.next()
            if arg.kind != "IDENT" or arg.text != "t":
                raise ParseError(
                    f"unknown function name {name!r}: opaque functions take the literal argument t",
                    tok.pos,
                )
            self.expect_op(")")
            order = 0
            after = self.peek()
            if after is not None and after.kind == "APOS":
                order = len(self.next().text)
            return FuncSym(name, order)
        if name in APPLY_FUNCS:
            raise ParseError(f"function {name!r} requires parentheses", tok.pos)
        if nxt is not None and nxt.kind == "APOS":
            raise ParseError("derivative marker may only follow x or an opaque function of t", nxt.pos)
        return ConstSym(name)


def parse(text: str) -> Expr:
    """Parse an expression string to its canonical tree."""
    return _Parser(text).parse()
