"""Exact rational-function kernel: polynomials, rational functions, parsing."""
from fractions import Fraction as Rational

from .parser import ParseError, UnknownVariableError, parse_expr
from .poly import Polynomial
from .ratfunc import PoleError, RationalFunction

__all__ = [
    "Rational",
    "Polynomial",
    "RationalFunction",
    "PoleError",
    "ParseError",
    "UnknownVariableError",
    "parse_expr",
    "rf_arith",
    "rf_partial",
    "rf_eval",
]


def rf_arith(op: str, a: RationalFunction, b: RationalFunction | None = None) -> RationalFunction:
    """Dispatch one field operation by name: add, sub, mul, div or neg."""
    if op == "neg":
        return -a
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def rf_partial(f: RationalFunction, var: str) -> RationalFunction:
    return f.diff(var)


def rf_eval(f: RationalFunction, assignment) -> Rational:
    return f.evaluate({k: Rational(v) for k, v in assignment.items()})
