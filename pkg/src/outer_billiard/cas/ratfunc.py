"""Rational functions over the rationals in canonical form.

Canonical form: numerator and denominator are coprime, both carry integer
coefficients with no common integer factor, and the denominator's grlex
leading coefficient is positive.  Zero is ``0/1``.  Under this convention
structural equality is mathematical equality.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence

from .poly import Polynomial, format_terms

__all__ = ["RationalFunction", "PoleError"]


class PoleError(ZeroDivisionError):
    """Denominator vanishes at the evaluation point."""


def _integerize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    coefs = list(num.terms.values()) + list(den.terms.values())
    m = lcm(*(c.denominator for c in coefs))
    g = gcd(*(c.numerator * (m // c.denominator) for c in coefs))
    k = Fraction(m, g)
    if den.leading_term()[1] < 0:
        k = -k
    if k != 1:
        num, den = num.scale(k), den.scale(k)
    return num, den


class RationalFunction:
    """Immutable quotient of two polynomials over a shared variable tuple."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *, _reduced: bool = False):
        if den is None:
            den = Polynomial.const(num.vars, 1)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = num, Polynomial.const(num.vars, 1)
        else:
            if not _reduced and not den.is_constant():
                g = num.gcd(den)
                if not g.is_constant():
                    num, den = num.exact_div(g), den.exact_div(g)
            num, den = _integerize(num, den)
        self.num = num
        self.den = den

    # -- constructors ----------------------------------------------------
    @classmethod
    def const(cls, vars: Sequence[str], c) -> "RationalFunction":
        return cls(Polynomial.const(vars, c))

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "RationalFunction":
        return cls(Polynomial.var(vars, name))

    @property
    def vars(self):
        return self.num.vars

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.const(self.vars, other)
        return NotImplemented

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError("rational function is not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    # -- field operations -------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if b == d:
            return RationalFunction(a + c, b)
        g = b.gcd(d)
        if g.is_constant():
            return RationalFunction(a * d + c * b, b * d, _reduced=True)
        bg, dg = b.exact_div(g), d.exact_div(g)
        num = a * dg + c * bg
        den = b * dg
        # any common factor of num and den divides g
        h = num.gcd(g)
        if not h.is_constant():
            num, den = num.exact_div(h), den.exact_div(h)
        return RationalFunction(num, den, _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if a.is_zero() or c.is_zero():
            return RationalFunction.const(self.vars, 0)
        g1, g2 = a.gcd(d), c.gcd(b)
        if not g1.is_constant():
            a, d = a.exact_div(g1), d.exact_div(g1)
        if not g2.is_constant():
            c, b = c.exact_div(g2), b.exact_div(g2)
        return RationalFunction(a * c, b * d, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.den, self.num, _reduced=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("exponent must be an integer")
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num**k, self.den**k, _reduced=True)

    # -- calculus / evaluation ---------------------------------------------
    def diff(self, name: str) -> "RationalFunction":
        """Exact partial derivative by the quotient rule."""
        if name not in self.vars:
            raise KeyError(f"unknown variable {name!r}")
        n, d = self.num, self.den
        if d.is_constant():
            return RationalFunction(n.diff(name), d, _reduced=True)
        dd = d.diff(name)
        g = d.gcd(dd)
        d1, e1 = d.exact_div(g), dd.exact_div(g)
        num, den = n.diff(name) * d1 - n * e1, d * d1
        # leftover common factors of num and den all divide d
        h = num.gcd(d)
        while not h.is_constant() and not num.is_zero():
            num, den = num.exact_div(h), den.exact_div(h)
            h = num.gcd(den.gcd(h))
        return RationalFunction(num, den, _reduced=True)

    def evaluate(self, assignment: Mapping[str, object]) -> Fraction:
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise KeyError(f"assignment missing variables {missing}")
        d = self.den.evaluate(assignment)
        if d == 0:
            raise PoleError(f"pole of {self} at {dict(assignment)}")
        return self.num.evaluate(assignment) / d

    def substitute(self, mapping: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Compose with rational functions over the same variable tuple."""
        mapping = {k: self._coerce(v) for k, v in mapping.items()}
        def lift(p: Polynomial) -> RationalFunction:
            acc = RationalFunction.const(self.vars, 0)
            for e, c in p.terms.items():
                t = RationalFunction.const(self.vars, c)
                for v, k in zip(self.vars, e):
                    if k:
                        base = mapping[v] if v in mapping else RationalFunction.var(self.vars, v)
                        t = t * base**k
                acc = acc + t
            return acc

        return lift(self.num) / lift(self.den)

    def swap(self, a: str, b: str) -> "RationalFunction":
        return RationalFunction(self.num.swap(a, b), self.den.swap(a, b), _reduced=True)

    def normalize(self) -> "RationalFunction":
        return RationalFunction(self.num, self.den)

    # -- comparison / printing --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.vars == other.vars and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        num = format_terms(self.vars, self.num.sorted_terms())
        if self.den == 1:
            return num
        den = format_terms(self.vars, self.den.sorted_terms())
        return f"({num})/({den})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r}, vars={self.vars})"
