"""Exact symbolic checks of the period-4 exterior-differential-system algebra.

Every identity is checked as an equality of canonical rational functions in
the variables ``D1, D2, S, u`` (plus ``D3, D4, v`` where a check needs them
free).  The area integrals ``D3 = 2S - D1`` and ``D4 = 2S - D2`` are
substituted wherever the derivation holds ``S`` fixed.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from .cas import Polynomial, RationalFunction, parse_expr

VARS = ("D1", "D2", "S", "u")
FREE_VARS = ("D1", "D2", "D3", "D4", "S", "u", "v")

# The compatibility polynomial as printed, as (coefficient, D1, D2, S) exponents.
PRINTED_POLYNOMIAL: Tuple[Tuple[int, int, int, int], ...] = (
    (-1, 4, 0, 0),
    (4, 3, 0, 1),
    (5, 2, 2, 0),
    (-10, 2, 1, 1),
    (-3, 2, 0, 2),
    (20, 1, 1, 2),
    (-2, 1, 0, 3),
    (-10, 1, 2, 1),
    (-2, 0, 1, 3),
    (-1, 0, 4, 0),
    (4, 0, 3, 1),
    (-3, 0, 2, 2),
)

CONVENTIONS = ("paper-signs", "rederived-signs")


def _rf(text: str, vars=VARS) -> RationalFunction:
    return parse_expr(text, vars)


def printed_polynomial(vars=VARS) -> Polynomial:
    idx = {v: i for i, v in enumerate(vars)}
    terms = {}
    for c, a, b, s in PRINTED_POLYNOMIAL:
        e = [0] * len(vars)
        e[idx["D1"]], e[idx["D2"]], e[idx["S"]] = a, b, s
        terms[tuple(e)] = c
    return Polynomial(vars, terms)


def area_substitution(vars=VARS) -> Dict[str, RationalFunction]:
    """``D3``/``D4`` in terms of ``D1``, ``D2``, ``S``."""
    return {"D3": _rf("2*S - D1", vars), "D4": _rf("2*S - D2", vars)}


def _with_area(text: str) -> RationalFunction:
    """Parse over the free variables, then eliminate D3, D4 (and v via u)."""
    f = parse_expr(text, FREE_VARS)
    sub = {
        "D3": parse_expr("2*S - D1", FREE_VARS),
        "D4": parse_expr("2*S - D2", FREE_VARS),
    }
    f = f.substitute(sub)
    # v = u/(D2 - D3) with D3 already eliminated
    if f.num.degree("v") > 0 or f.den.degree("v") > 0:
        f = f.substitute({"v": parse_expr("u/(D2 - (2*S - D1))", FREE_VARS)})
    return _restrict(f, VARS)


def _restrict(f: RationalFunction, vars) -> RationalFunction:
    """Re-express ``f`` over a smaller variable tuple (must not use the dropped ones)."""
    keep = [f.vars.index(v) for v in vars]

    def proj(p: Polynomial) -> Polynomial:
        terms = {}
        for e, c in p.terms.items():
            if any(e[i] for i in range(len(e)) if i not in keep):
                raise ValueError(f"{f} still depends on eliminated variables")
            terms[tuple(e[i] for i in keep)] = c
        return Polynomial(vars, terms)

    return RationalFunction(proj(f.num), proj(f.den), _reduced=True)


# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "seconds": round(self.seconds, 4),
            **self.details,
        }


@dataclass(frozen=True)
class DuCoefficients:
    a1: RationalFunction
    a2: RationalFunction
    b1: RationalFunction
    b2: RationalFunction


@dataclass(frozen=True)
class CompatibilityReport:
    convention: str
    E: RationalFunction
    cleared: Polynomial
    u_minus_1_divides: bool
    match: bool
    scale: Fraction | None  # cleared == scale * printed, when proportional

    def term_list(self) -> List[dict]:
        out = []
        for e, c in self.cleared.sorted_terms():
            out.append({"coefficient": str(c), "exponents": dict(zip(self.cleared.vars, e))})
        return out


def verify_D_factorization() -> Tuple[bool, RationalFunction]:
    """D2*D4 - D1*D3 against (D1 - D2)*(D2 - D3) under the area integrals."""
    diff = _with_area("D2*D4 - D1*D3 - (D1 - D2)*(D2 - D3)")
    return diff.is_zero(), diff


def build_ab() -> DuCoefficients:
    ratio = "S/(D2 - D3)"
    a1 = _with_area(f"D4/D1*(1 + {ratio}) + D2/D3*(-1 + {ratio})")
    a2 = _with_area(f"D1/D4*(-1 + {ratio}) + D3/D2*(1 + {ratio})")
    b1 = _with_area(
        "(D4/D1*(D1 + D2)*(S + D2 - D3) - D2/D3*(D3 + D4)*(S - D2 + D3))"
        "/(D2*D4 - D1*D3)"
    )
    b2 = _with_area(
        "(D1/D4*(D3 + D4)*(S - D2 + D3) - D3/D2*(D1 + D2)*(S + D2 - D3))"
        "/(D2*D4 - D1*D3)"
    )
    return DuCoefficients(a1, a2, b1, b2)


def compatibility_expression(ab: DuCoefficients, convention: str) -> RationalFunction:
    """The integrability bracket E(D1, D2, S, u) that must vanish.

    ``paper-signs`` adds the cross term (a2 b1 - a1 b2)/(8S) in both slots;
    ``rederived-signs`` uses + in the u slot and - in the constant slot, which
    is what d((a1 u + b1) dD1 + (a2 u + b2) dD2) = 0 gives after replacing
    d_i u by (1 - u)(a_i u + b_i)/(8S).
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    u = RationalFunction.var(VARS, "u")
    S = RationalFunction.var(VARS, "S")
    cross = (ab.a2 * ab.b1 - ab.a1 * ab.b2) / (8 * S)
    sign = 1 if convention == "paper-signs" else -1
    return u * (ab.a1.diff("D2") - ab.a2.diff("D1") + cross) + (
        ab.b1.diff("D2") - ab.b2.diff("D1") + sign * cross
    )


def compatibility_polynomial(convention: str, ab: DuCoefficients | None = None) -> CompatibilityReport:
    ab = ab or build_ab()
    E = compatibility_expression(ab, convention)
    # multiply by D1 D2 D3 D4 D / S, then divide by (u - 1)
    factor = _with_area("D1*D2*D3*D4*(D2*D4 - D1*D3)/S")
    pre = E * factor
    u_minus_1 = Polynomial.var(VARS, "u") - 1
    divides = pre.is_polynomial() and u_minus_1.divides(pre.as_polynomial())
    if pre.is_polynomial():
        cleared_rf = pre / RationalFunction(u_minus_1) if divides else pre
    else:
        cleared_rf = pre
    printed = printed_polynomial()
    cleared = cleared_rf.as_polynomial() if cleared_rf.is_polynomial() else cleared_rf.num
    match = divides and cleared == printed
    scale = None
    if divides and cleared_rf.is_polynomial() and not cleared.is_zero():
        ratio = RationalFunction(cleared) / RationalFunction(printed)
        if ratio.is_constant():
            scale = ratio.evaluate({v: 0 for v in VARS})
    return CompatibilityReport(convention, E, cleared, divides, match, scale)


def find_matching_convention() -> CompatibilityReport:
    ab = build_ab()
    reports = [compatibility_polynomial(c, ab) for c in CONVENTIONS]
    for r in reports:
        if r.match:
            return r
    raise AssertionError(
        "no sign convention reproduces the printed polynomial: "
        + "; ".join(f"{r.convention}: {r.cleared}" for r in reports)
    )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreePeriodRecord:
    a: RationalFunction
    b: RationalFunction
    determinant: RationalFunction
    obstruction_printed: RationalFunction  # coefficient of w1^w2 with dw = (3/S) w^w
    obstruction_rederived: RationalFunction  # same with dw = (4/Delta) w^w, Delta = 2S


def three_period_check() -> ThreePeriodRecord:
    """Triangle case: w3 = a w1 + b w2 forced to a = b = -1, then d(sum) != 0.

    Two-forms on the rank-2 module are multiples of w1^w2.  With
    w3 = a w1 + b w2:  w2^w3 = -a w1^w2  and  w3^w1 = -b w1^w2.  Equating
    both to w1^w2 gives a linear system in (a, b).
    """
    vars = ("S",)
    one = RationalFunction.const(vars, 1)
    zero = RationalFunction.const(vars, 0)
    S = RationalFunction.var(vars, "S")
    # rows: coefficient of (a, b) in w2^w3 and w3^w1; right-hand side: w1^w2 -> 1
    m = [[-one, zero], [zero, -one]]
    rhs = [one, one]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    a = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det
    b = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det
    # d(w1 + w2 + w3) = 3 * c * (w1^w2), each w^j^w^{j+1} equal to w1^w2
    printed = 3 * (3 / S)
    rederived = 3 * (4 / (2 * S))
    return ThreePeriodRecord(a, b, det, printed, rederived)


@dataclass(frozen=True)
class DegenerateRecord:
    b2_forces_D: bool
    d_factor_sign: int  # D = sign * (D1 - D2)(D1 - D4) under the area integrals
    d12_implies_d34: bool
    v_constraint_omega1: RationalFunction  # difference of w1 coefficients on D1 = D2
    v_constraint_omega3: RationalFunction
    second_branch_omega1: RationalFunction  # dD1 + dD2 coefficients on D1 = D4
    second_branch_omega3: RationalFunction


def degenerate_case_check() -> DegenerateRecord:
    V = FREE_VARS
    # (i) -D4/D1 = -D3/D2 cross-multiplies to D2 D4 - D1 D3 = 0
    eq = parse_expr("-D4/D1 - (-D3/D2)", V)
    D = parse_expr("D2*D4 - D1*D3", V)
    b2_forces = RationalFunction(eq.num) == RationalFunction(-D.num) or RationalFunction(eq.num) == D
    # (ii) factorization with the area integrals
    Dsub = _with_area("D2*D4 - D1*D3")
    prod = _with_area("(D1 - D2)*(D1 - D4)")
    if Dsub == prod:
        sign = 1
    elif Dsub == -prod:
        sign = -1
    else:
        sign = 0
    # (iii) D1 = D2 => D3 = D4
    d34 = _with_area("D3 - D4").substitute({"D2": RationalFunction.var(VARS, "D1")})
    # (iv) dD1 = dD2 on D1 = D2, D3 = D4; coefficients of w1 and w3 must agree
    c1_d1 = "D3/D4*(1 - v*(D1 + D4))"
    c3_d1 = "D1/D2*(-1 - v*(D2 + D3))"
    c1_d2 = "D2/D1*(1 + v*(D1 + D4))"
    c3_d2 = "D4/D3*(-1 + v*(D2 + D3))"
    on_branch = {"D2": parse_expr("D1", V), "D4": parse_expr("D3", V)}
    w1 = parse_expr(f"{c1_d1} - ({c1_d2})", V).substitute(on_branch)
    w3 = parse_expr(f"{c3_d1} - ({c3_d2})", V).substitute(on_branch)
    # second branch D1 = D4, D2 = D3: dD1 = dD4 = -dD2 so dD1 + dD2 = 0
    branch2 = {"D4": parse_expr("D1", V), "D3": parse_expr("D2", V)}
    s1 = parse_expr(f"{c1_d1} + {c1_d2}", V).substitute(branch2)
    s3 = parse_expr(f"{c3_d1} + {c3_d2}", V).substitute(branch2)
    return DegenerateRecord(b2_forces, sign, d34.is_zero(), w1, w3, s1, s3)


def _del_om_matrix():
    """Coefficients of (dD1, dD2) in the basis (w2, w4)."""
    Dv = "((D2*D4 - D1*D3)*v)"
    return [
        [
            _with_area(f"D3/(D2*{Dv})*(D1 + D2 - {Dv})"),
            _with_area(f"D1/(D4*{Dv})*(D3 + D4 + {Dv})"),
        ],
        [
            _with_area(f"D4/(D1*{Dv})*(D1 + D2 + {Dv})"),
            _with_area(f"D2/(D3*{Dv})*(D3 + D4 - {Dv})"),
        ],
    ]


def _om_delta_matrix():
    """Coefficients of (w2, w4) in the basis (dD1, dD2)."""
    Dv = "((D2*D4 - D1*D3)*v)"
    return [
        [
            _with_area(f"-1/(8*S)*D2/D3*(D3 + D4 - {Dv})"),
            _with_area(f"1/(8*S)*D1/D4*(D3 + D4 + {Dv})"),
        ],
        [
            _with_area(f"1/(8*S)*D4/D1*(D1 + D2 + {Dv})"),
            _with_area(f"-1/(8*S)*D3/D2*(D1 + D2 - {Dv})"),
        ],
    ]


def _matmul(a, b):
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]


def _det(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def invert_delta_forms() -> Tuple[bool, dict]:
    M = _del_om_matrix()
    N = _om_delta_matrix()
    prod = _matmul(N, M)
    identity = all(
        prod[i][j] == RationalFunction.const(VARS, 1 if i == j else 0) for i in range(2) for j in range(2)
    )
    det_ok = _det(M) * _det(N) == RationalFunction.const(VARS, 1)
    point = {"D1": 2, "D2": 5, "S": 4, "u": 3}
    numeric = [[sum(N[i][k].evaluate(point) * M[k][j].evaluate(point) for k in range(2)) for j in range(2)] for i in range(2)]
    numeric_ok = numeric == [[1, 0], [0, 1]]
    return identity and det_ok and numeric_ok, {
        "product_is_identity": identity,
        "determinants_reciprocal": det_ok,
        "numeric_spot_check": numeric_ok,
        "det_del_om": str(_det(M)),
    }


# ---------------------------------------------------------------------------


def _timed(name: str, fn: Callable[[], Tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, details = fn()
    except Exception as exc:  # a failing check must not hide the others
        ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CheckResult(name, ok, details, time.perf_counter() - t0)


def _check_d_factorization():
    ok, diff = verify_D_factorization()
    point = {"D1": 2, "D2": 5, "S": 4, "u": 0}
    d = _with_area("D2*D4 - D1*D3").evaluate(point)
    free = parse_expr("D2*D4 - D1*D3 - (D1 - D2)*(D2 - D3)", FREE_VARS)
    return ok and d == 3 and not free.is_zero(), {
        "difference": str(diff),
        "spot_value": str(d),
        "free_variables_differ": not free.is_zero(),
    }


def _check_ab():
    ab = build_ab()
    a1 = ab.a1.evaluate({"D1": 2, "D2": 5, "S": 4, "u": 0})
    sym_a = ab.a1.swap("D1", "D2") == ab.a2
    sym_b = ab.b1.swap("D1", "D2") == ab.b2
    return a1 == Fraction(-26, 3) and sym_a and sym_b, {
        "a1_at_(2,5,4)": str(a1),
        "a2_is_swapped_a1": sym_a,
        "b2_is_swapped_b1": sym_b,
        "a1": str(ab.a1),
        "b1": str(ab.b1),
    }


def _check_compatibility():
    report = find_matching_convention()
    others = [compatibility_polynomial(c) for c in CONVENTIONS if c != report.convention]
    swap_sym = report.cleared.swap("D1", "D2") == report.cleared
    at_one = report.cleared.evaluate({"D1": 1, "D2": 1, "S": 1, "u": 0})
    return report.match and report.u_minus_1_divides, {
        "convention": report.convention,
        "u_minus_1_divides": report.u_minus_1_divides,
        "terms": report.term_list(),
        "n_terms": len(report.cleared.terms),
        "symmetric_under_swap": swap_sym,
        "value_at_ones": str(at_one),
        "other_conventions": {
            o.convention: {"u_minus_1_divides": o.u_minus_1_divides, "match": o.match} for o in others
        },
        "partial_convention": "d/dD_i with D3 = 2S - D1, D4 = 2S - D2 and S held fixed",
    }


def _check_three_period():
    r = three_period_check()
    minus_one = RationalFunction.const(("S",), -1)
    ok = r.a == minus_one and r.b == minus_one and not r.determinant.is_zero()
    ok = ok and not r.obstruction_printed.is_zero() and not r.obstruction_rederived.is_zero()
    return ok, {
        "a": str(r.a),
        "b": str(r.b),
        "determinant": str(r.determinant),
        "obstruction_coefficient": str(r.obstruction_printed),
        "obstruction_coefficient_from_4_over_delta": str(r.obstruction_rederived),
    }


def _check_degenerate():
    r = degenerate_case_check()
    V = FREE_VARS
    v = RationalFunction.var(V, "v")
    expected_w1 = -2 * v * parse_expr("D1 + D3", V)
    expected_w3 = -2 * v * parse_expr("D1 + D3", V)
    ok = (
        r.b2_forces_D
        and r.d_factor_sign != 0
        and r.d12_implies_d34
        and r.v_constraint_omega1 == expected_w1
        and r.v_constraint_omega3 == expected_w3
        and not r.second_branch_omega1.is_zero()
        and not r.second_branch_omega3.is_zero()
    )
    return ok, {
        "b2_forces_D_zero": r.b2_forces_D,
        "D_equals_sign_times_(D1-D2)(D1-D4)": r.d_factor_sign,
        "D1_eq_D2_implies_D3_eq_D4": r.d12_implies_d34,
        "omega1_constraint": str(r.v_constraint_omega1),
        "omega3_constraint": str(r.v_constraint_omega3),
        "branch_D1_eq_D4_omega1": str(r.second_branch_omega1),
        "branch_D1_eq_D4_omega3": str(r.second_branch_omega3),
    }


SUITES: Dict[str, Callable[[], Tuple[bool, dict]]] = {
    "D_factorization": _check_d_factorization,
    "build_ab": _check_ab,
    "compatibility_polynomial": _check_compatibility,
    "invert_delta_forms": invert_delta_forms,
    "three_period": _check_three_period,
    "degenerate_cases": _check_degenerate,
}


def run_suite(names: List[str] | None = None) -> List[CheckResult]:
    names = list(SUITES) if not names or names == ["all"] else names
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; available: {sorted(SUITES)}")
    return [_timed(n, SUITES[n]) for n in names]


def report_json(results: List[CheckResult]) -> dict:
    return {
        "all_passed": all(r.passed for r in results),
        "checks": [r.to_json() for r in results],
    }
