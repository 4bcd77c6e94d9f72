"""Recursive-descent parser for transseries expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-'? factor
    factor := base ('^' power)?
    power  := '-'? ratlit ('^' power)? | '(' '-'? ratlit ')'
    base   := ratlit | 'x' | 'Y' | '(' expr ')'
            | ('exp'|'log'|'diff'|'int') '(' expr ')' | 'e' '^' factor-argument
    ratlit := integer | integer '/' positive-integer

``e^(...)`` is sugar for ``exp(...)``.  Decimal literals are rejected.
Error offsets are byte offsets into the UTF-8 encoded input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ExprSyntaxError


@dataclass(frozen=True)
class Expr:
    pos: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class Number(Expr):
    value: Fraction


@dataclass(frozen=True)
class VarX(Expr):
    pass


@dataclass(frozen=True)
class VarY(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr


@dataclass(frozen=True)
class Diff(Expr):
    arg: Expr


@dataclass(frozen=True)
class Int(Expr):
    arg: Expr


_FUNCS = {"exp": Exp, "log": Log, "diff": Diff, "int": Int}
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|(\S))")


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.pos}"


def _tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:  # trailing whitespace
            break
        num, name, sym = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(_Tok("int", num, start))
        elif name is not None:
            out.append(_Tok("name", name, start))
        else:
            out.append(_Tok("sym", sym, start))
        i = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # -- helpers ------------------------------------------------------
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, sym: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == "sym" and t.text == sym

    def expect(self, sym: str) -> _Tok:
        if not self.at(sym):
            self.fail(f"expected {sym!r}", self.peek())
        return self.next()

    def fail(self, msg: str, tok: _Tok):
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        offset = len(self.text[: tok.pos].encode("utf-8"))
        raise ExprSyntaxError(f"{msg}, found {found}", offset, self.text)

    # -- grammar ------------------------------------------------------
    def parse(self) -> Expr:
        e = self.expr()
        if self.peek().kind != "end":
            self.fail("unexpected token", self.peek())
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.next()
            right = self.term()
            cls = Add if op.text == "+" else Sub
            left = cls(left, right, pos=op.pos)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.next()
            if op.text == "*" and self.at("*"):
                self.fail("'**' is not an operator; use '^'", self.peek())
            right = self.unary()
            cls = Mul if op.text == "*" else Div
            left = cls(left, right, pos=op.pos)
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            op = self.next()
            return Neg(self.factor(), pos=op.pos)
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        if self.at("^"):
            op = self.next()
            base = Pow(base, self.power(), pos=op.pos)
        return base

    def power(self) -> Fraction:
        if self.at("("):
            self.next()
            value = self.signed_ratlit()
            self.expect(")")
            return value
        value = self.signed_ratlit()
        if self.at("^"):
            op = self.next()
            tail = self.power()
            if tail.denominator != 1:
                self.fail("nested exponent must be an integer", op)
            value = value ** tail.numerator
        return value

    def signed_ratlit(self) -> Fraction:
        sign = 1
        if self.at("-"):
            self.next()
            sign = -1
        if self.peek().kind != "int":
            self.fail("expected a rational exponent", self.peek())
        return sign * self.ratlit()

    def ratlit(self) -> Fraction:
        tok = self.next()
        if self.at("."):
            self.fail("decimal literals are not supported; use p/q", self.peek())
        num = int(tok.text)
        # after a division operator, a/b/c keeps its left-to-right reading
        after_div = self.i >= 2 and self.toks[self.i - 2].kind == "sym" and self.toks[self.i - 2].text == "/"
        if self.at("/") and self.peek(1).kind == "int" and not after_div:
            self.next()
            den_tok = self.next()
            den = int(den_tok.text)
            if den == 0:
                self.fail("zero denominator", den_tok)
            if self.at("."):
                self.fail("decimal literals are not supported; use p/q", self.peek())
            return Fraction(num, den)
        return Fraction(num)

    def base(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            return Number(self.ratlit(), pos=tok.pos)
        if tok.kind == "name":
            self.next()
            if tok.text == "x":
                return VarX(pos=tok.pos)
            if tok.text == "Y":
                return VarY(pos=tok.pos)
            if tok.text in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[tok.text](arg, pos=tok.pos)
            if tok.text == "e" and self.at("^"):
                self.next()
                if self.at("("):
                    self.next()
                    arg = self.expr()
                    self.expect(")")
                else:
                    arg = self.factor()
                return Exp(arg, pos=tok.pos)
            self.fail("unknown name", tok)
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected an operand", tok)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def contains_y(e: Expr) -> bool:
    if isinstance(e, VarY):
        return True
    return any(contains_y(c) for c in children(e))


def children(e: Expr) -> tuple:
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Neg, Exp, Log, Diff, Int)):
        return (e.arg,)
    return ()
