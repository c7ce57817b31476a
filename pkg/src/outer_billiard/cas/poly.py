"""Sparse multivariate polynomials over the rationals.

A polynomial is a mapping from exponent vectors to nonzero ``Fraction``
coefficients over a fixed, ordered tuple of variable names.  Terms are
listed in graded-lexicographic order (total degree first, then lex with the
first variable most significant).

The low-level helpers working on raw ``dict`` term maps are module private;
``Polynomial`` wraps them with variable bookkeeping.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, Mapping, Sequence, Tuple

Exps = Tuple[int, ...]
Terms = Dict[Exps, Fraction]

__all__ = ["Polynomial", "grlex_key"]


def grlex_key(exps: Exps):
    return (sum(exps), exps)


# ---------------------------------------------------------------------------
# raw term-map arithmetic


def _const(n: int, c) -> Terms:
    c = Fraction(c)
    return {(0,) * n: c} if c else {}


def _add(a: Terms, b: Terms) -> Terms:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for e, c in b.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s += c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _neg(a: Terms) -> Terms:
    return {e: -c for e, c in a.items()}


def _sub(a: Terms, b: Terms) -> Terms:
    return _add(a, _neg(b))


def _scale(a: Terms, k) -> Terms:
    if not k:
        return {}
    return {e: c * k for e, c in a.items()}


def _mul(a: Terms, b: Terms) -> Terms:
    if len(a) < len(b):
        a, b = b, a
    out: Terms = {}
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e)
            out[e] = ca * cb if s is None else s + ca * cb
    return {e: c for e, c in out.items() if c}


def _mul_monomial(a: Terms, exps: Exps, coef) -> Terms:
    return {tuple(x + y for x, y in zip(e, exps)): c * coef for e, c in a.items()}


def _pow(a: Terms, k: int, n: int) -> Terms:
    result = _const(n, 1)
    base = a
    while k:
        if k & 1:
            result = _mul(result, base)
        k >>= 1
        if k:
            base = _mul(base, base)
    return result


def _leading(a: Terms) -> Tuple[Exps, Fraction]:
    e = max(a, key=grlex_key)
    return e, a[e]


def _is_const(a: Terms) -> bool:
    return not a or (len(a) == 1 and not any(next(iter(a))))


def _divexact(a: Terms, b: Terms) -> Terms:
    """Exact multivariate division; raises ArithmeticError on a remainder."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if _is_const(b):
        return _scale(a, 1 / next(iter(b.values())))
    eb, cb = _leading(b)
    q: Terms = {}
    r = dict(a)
    while r:
        er, cr = _leading(r)
        shift = tuple(x - y for x, y in zip(er, eb))
        if min(shift) < 0:
            raise ArithmeticError("inexact polynomial division")
        coef = cr / cb
        q[shift] = coef
        r = _sub(r, _mul_monomial(b, shift, coef))
    return q


def _deg(a: Terms, k: int) -> int:
    return max((e[k] for e in a), default=-1)


def _coeffs(a: Terms, k: int) -> Dict[int, Terms]:
    out: Dict[int, Terms] = {}
    for e, c in a.items():
        d = e[k]
        out.setdefault(d, {})[e[:k] + (0,) + e[k + 1:]] = c
    return out


def _lc(a: Terms, k: int) -> Terms:
    d = _deg(a, k)
    return {e[:k] + (0,) + e[k + 1:]: c for e, c in a.items() if e[k] == d}


def _xpow(n: int, k: int, d: int) -> Exps:
    e = [0] * n
    e[k] = d
    return tuple(e)


def _prem(a: Terms, b: Terms, k: int, n: int) -> Terms:
    db = _deg(b, k)
    lcb = _lc(b, k)
    r = a
    e = _deg(a, k) - db + 1
    while r and _deg(r, k) >= db:
        dr = _deg(r, k)
        t = _mul_monomial(_lc(r, k), _xpow(n, k, dr - db), 1)
        r = _sub(_mul(lcb, r), _mul(t, b))
        e -= 1
    return _mul(_pow(lcb, e, n), r) if e else r


def _monic(a: Terms) -> Terms:
    if not a:
        return a
    _, c = _leading(a)
    return a if c == 1 else _scale(a, 1 / c)


def _content(a: Terms, k: int, n: int) -> Terms:
    g: Terms = {}
    for c in _coeffs(a, k).values():
        g = _gcd(g, c, n)
        if _is_const(g):
            return _const(n, 1)
    return g


def _subresultant_gcd(a: Terms, b: Terms, k: int, n: int) -> Terms:
    # a, b primitive in variable k with deg_k(a) >= deg_k(b) > 0
    g = h = _const(n, 1)
    while True:
        delta = _deg(a, k) - _deg(b, k)
        r = _prem(a, b, k, n)
        if not r:
            return b
        if _deg(r, k) == 0:
            return _const(n, 1)
        a = b
        b = _divexact(r, _mul(g, _pow(h, delta, n)))
        g = _lc(a, k)
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = _divexact(_pow(g, delta, n), _pow(h, delta - 1, n))


_EVAL_POINTS = (3, -5, 7, 11, -13, 17, 19, -23)


def _univariate_image(a: Terms, k: int, point: Sequence[int]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for e, c in a.items():
        v = c
        for j, ej in enumerate(e):
            if j != k and ej:
                v *= point[j] ** ej
        out[e[k]] = out.get(e[k], 0) + v
    return {d: c for d, c in out.items() if c}


def _univariate_gcd_degree(f: Dict[int, Fraction], g: Dict[int, Fraction]) -> int:
    while g:
        dg, lg = max(g), g[max(g)]
        while f and max(f) >= dg:
            df = max(f)
            q = f[df] / lg
            for d, c in g.items():
                v = f.get(d + df - dg, 0) - q * c
                if v:
                    f[d + df - dg] = v
                else:
                    f.pop(d + df - dg, None)
        f, g = g, f
    return max(f) if f else -1


def _coprime_by_images(a: Terms, b: Terms, n: int) -> bool:
    """Cheap proof that gcd(a, b) is constant.

    Specializing every variable but x_k at a point where both leading
    coefficients in x_k survive can only raise the degree of the gcd in x_k.
    So constant univariate image gcds for every shared variable prove that
    the gcd is constant.  A False answer proves nothing.
    """
    for k in range(n):
        if _deg(a, k) <= 0 or _deg(b, k) <= 0:
            continue
        da, db = _deg(a, k), _deg(b, k)
        for shift in range(len(_EVAL_POINTS)):
            point = [_EVAL_POINTS[(j + shift) % len(_EVAL_POINTS)] for j in range(n)]
            fa, fb = _univariate_image(a, k, point), _univariate_image(b, k, point)
            if fa and fb and max(fa) == da and max(fb) == db:
                break
        else:
            return False
        if _univariate_gcd_degree(fa, fb) > 0:
            return False
    return True


def _min_exponents(a: Terms) -> Exps:
    return tuple(min(col) for col in zip(*a))


def _shift_down(a: Terms, m: Exps) -> Terms:
    if not any(m):
        return a
    return {tuple(x - y for x, y in zip(e, m)): c for e, c in a.items()}


def _total_degree(a: Terms) -> int:
    return max((sum(e) for e in a), default=-1)


def _gcd(a: Terms, b: Terms, n: int) -> Terms:
    """Monic (grlex) gcd of two term maps."""
    if not a:
        return _monic(b)
    if not b:
        return _monic(a)
    if _is_const(a) or _is_const(b):
        return _const(n, 1)
    if a == b:
        return _monic(a)
    if _coprime_by_images(a, b, n):
        return _const(n, 1)
    ma, mb = _min_exponents(a), _min_exponents(b)
    if any(ma) or any(mb):
        m = tuple(min(x, y) for x, y in zip(ma, mb))
        g = _gcd(_shift_down(a, ma), _shift_down(b, mb), n)
        return _mul_monomial(g, m, 1)
    for p, q in ((a, b), (b, a)):
        if _total_degree(p) <= _total_degree(q):
            try:
                _divexact(q, p)
                return _monic(p)
            except ArithmeticError:
                pass
    used = [k for k in range(n) if _deg(a, k) > 0 or _deg(b, k) > 0]
    k = used[-1]
    if _deg(a, k) == 0:
        return _gcd(a, _content(b, k, n), n)
    if _deg(b, k) == 0:
        return _gcd(_content(a, k, n), b, n)
    ca, cb = _content(a, k, n), _content(b, k, n)
    pa, pb = _divexact(a, ca), _divexact(b, cb)
    c = _gcd(ca, cb, n)
    if _deg(pa, k) < _deg(pb, k):
        pa, pb = pb, pa
    g = _subresultant_gcd(pa, pb, k, n)
    if _deg(g, k) > 0:
        g = _divexact(g, _content(g, k, n))
    return _monic(_mul(c, g))


def _derivative(a: Terms, k: int) -> Terms:
    out: Terms = {}
    for e, c in a.items():
        if e[k]:
            out[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
    return out


# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable sparse polynomial with ``Fraction`` coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exps, object] | None = None):
        self.vars: Tuple[str, ...] = tuple(vars)
        n = len(self.vars)
        clean: Terms = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent vector {e} does not match {n} variables")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.terms: Terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, vars: Tuple[str, ...], terms: Terms) -> "Polynomial":
        p = object.__new__(cls)
        p.vars = vars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, vars: Sequence[str], c) -> "Polynomial":
        vars = tuple(vars)
        return cls._raw(vars, _const(len(vars), c))

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "Polynomial":
        vars = tuple(vars)
        if name not in vars:
            raise KeyError(f"unknown variable {name!r}")
        return cls._raw(vars, {_xpow(len(vars), vars.index(name), 1): Fraction(1)})

    # -- structure -------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.vars, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return _is_const(self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def sorted_terms(self) -> list[Tuple[Exps, Fraction]]:
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> Tuple[Exps, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return _leading(self.terms)

    def degree(self, name: str | None = None) -> int:
        """Total degree, or degree in ``name``; -1 for the zero polynomial."""
        if name is None:
            return max((sum(e) for e in self.terms), default=-1)
        return _deg(self.terms, self.vars.index(name))

    def content(self) -> Fraction:
        """Positive rational g such that self/g has coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        den = lcm(*(c.denominator for c in self.terms.values()))
        num = gcd(*(c.numerator for c in self.terms.values()))
        return Fraction(num, den)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(self.vars, _add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.vars, _neg(self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(self.vars, _sub(self.terms, other.terms))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(self.vars, _mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        return Polynomial._raw(self.vars, _pow(self.terms, k, len(self.vars)))

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """Quotient of an exact division; ArithmeticError if it leaves a remainder."""
        self._check(other)
        return Polynomial._raw(self.vars, _divexact(self.terms, other.terms))

    def divides(self, other: "Polynomial") -> bool:
        try:
            other.exact_div(self)
        except ArithmeticError:
            return False
        return True

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Greatest common divisor, normalized to leading coefficient 1."""
        self._check(other)
        return Polynomial._raw(self.vars, _gcd(self.terms, other.terms, len(self.vars)))

    def diff(self, name: str) -> "Polynomial":
        if name not in self.vars:
            raise KeyError(f"unknown variable {name!r}")
        return Polynomial._raw(self.vars, _derivative(self.terms, self.vars.index(name)))

    def scale(self, k) -> "Polynomial":
        return Polynomial._raw(self.vars, _scale(self.terms, Fraction(k)))

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate at a total assignment; exact for Fraction/int values."""
        missing = [v for v in self.vars if v not in assignment]
        if missing and any(
            e[self.vars.index(v)] for v in missing for e in self.terms
        ):
            raise KeyError(f"assignment missing variables {missing}")
        vals = [assignment.get(v, 0) for v in self.vars]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t = t * x**k
            total += t
        return total

    def substitute(self, mapping: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Replace variables by polynomials over the same variable tuple."""
        n = len(self.vars)
        images = []
        for i, v in enumerate(self.vars):
            if v in mapping:
                img = mapping[v]
                self._check(img)
                images.append(img.terms)
            else:
                images.append({_xpow(n, i, 1): Fraction(1)})
        out: Terms = {}
        cache: Dict[Tuple[int, int], Terms] = {}
        for e, c in self.terms.items():
            t = _const(n, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = _pow(images[i], k, n)
                    t = _mul(t, cache[key])
            out = _add(out, t)
        return Polynomial._raw(self.vars, out)

    def swap(self, a: str, b: str) -> "Polynomial":
        """Exchange two variables."""
        i, j = self.vars.index(a), self.vars.index(b)
        out: Terms = {}
        for e, c in self.terms.items():
            e = list(e)
            e[i], e[j] = e[j], e[i]
            out[tuple(e)] = c
        return Polynomial._raw(self.vars, out)

    # -- comparison / printing --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.terms == _const(len(self.vars), other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return format_terms(self.vars, self.sorted_terms())

    def __repr__(self):
        return f"Polynomial({self.vars}, {str(self)!r})"


def format_monomial(vars: Iterable[str], exps: Exps) -> str:
    parts = []
    for v, k in zip(vars, exps):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_terms(vars: Sequence[str], terms: Sequence[Tuple[Exps, Fraction]]) -> str:
    if not terms:
        return "0"
    out = []
    for idx, (e, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        mono = format_monomial(vars, e)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)
