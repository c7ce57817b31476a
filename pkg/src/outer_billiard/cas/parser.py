"""Precedence-climbing parser for rational-function expressions.

Grammar::

    expr    := operand (binop operand)*
    operand := '-' operand_pow | '+' operand_pow | atom
    atom    := INTEGER | IDENT | '(' expr ')'
    binop   := '+' | '-'          (precedence 1, left)
             | '*' | '/'          (precedence 2, left)
             | '^'                (precedence 3, right; exponent must be a
                                   nonnegative integer constant)

Unary minus binds looser than ``^`` so ``-x^2`` is ``-(x^2)``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, NamedTuple, Sequence

from .ratfunc import RationalFunction

__all__ = ["ParseError", "UnknownVariableError", "parse_expr", "tokenize"]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownVariableError(ParseError):
    pass


class Token(NamedTuple):
    kind: str  # 'int', 'name', 'op', 'end'
    text: str
    offset: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([^\W\d]\w*)|(\S))?", re.UNICODE)

_BINARY = {"+": (1, "left"), "-": (1, "left"), "*": (2, "left"), "/": (2, "left"), "^": (3, "right")}


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m.group(1) is not None:
            tokens.append(Token("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(Token("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(Token("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, vars: Sequence[str]):
        self.vars = tuple(vars)
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, what: str = "unexpected token"):
        t = self.tok
        desc = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"syntax error: {what} ({desc})", t.offset)

    def parse(self) -> RationalFunction:
        result = self.climb(1)
        if self.tok.kind != "end":
            self.fail("expected operator")
        return result

    def climb(self, min_prec: int) -> RationalFunction:
        lhs = self.operand()
        while self.tok.kind == "op" and self.tok.text in _BINARY:
            op = self.tok.text
            prec, assoc = _BINARY[op]
            if prec < min_prec:
                break
            op_tok = self.advance()
            rhs_start = self.tok.offset
            rhs = self.climb(prec + 1 if assoc == "left" else prec)
            lhs = self.apply(op, lhs, rhs, op_tok, rhs_start)
        return lhs

    def operand(self) -> RationalFunction:
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            self.advance()
            inner = self.climb(3)
            return -inner if t.text == "-" else inner
        return self.atom()

    def atom(self) -> RationalFunction:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return RationalFunction.const(self.vars, int(t.text))
        if t.kind == "name":
            self.advance()
            if t.text not in self.vars:
                raise UnknownVariableError(f"unknown variable {t.text!r}", t.offset)
            return RationalFunction.var(self.vars, t.text)
        if t.kind == "op" and t.text == "(":
            self.advance()
            inner = self.climb(1)
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.fail("expected ')'")
            self.advance()
            return inner
        self.fail("expected operand")

    def apply(self, op, lhs, rhs, op_tok, rhs_start):
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            if rhs.is_zero():
                raise ZeroDivisionError(f"division by the zero polynomial at offset {op_tok.offset}")
            return lhs / rhs
        # '^'
        if not rhs.is_constant():
            raise ParseError("exponent must be an integer constant", rhs_start)
        k = rhs.evaluate({v: 0 for v in self.vars})
        if k.denominator != 1 or k < 0:
            raise ParseError("exponent must be a nonnegative integer", rhs_start)
        return lhs ** int(k)


def parse_expr(text: str, vars: Sequence[str]) -> RationalFunction:
    """Parse ``text`` into a normalized rational function over ``vars``."""
    return _Parser(text, vars).parse()


def parse_rational(text: str) -> Fraction:
    """Parse an ``int`` or ``p/q`` literal (used for coordinates)."""
    return Fraction(text.strip())
