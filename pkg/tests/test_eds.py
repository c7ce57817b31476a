import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from outer_billiard.eds import (
    DegenerateQuadError,
    FamilyError,
    NotIntegralError,
    QuadConfig,
    coframe_solve,
    ddelta_check,
    family_check_report,
    family_residual,
    integral_element,
    midpoint_family,
    omega,
    rotation_family,
    square_orbit,
    structure_residuals,
    tangency_direction,
    theta,
    theta56,
    theta56_matrix,
)

F = Fraction
BASE = square_orbit(0.3, -0.4)


def _midpoint_dirs():
    a = [(1.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (-1.0, 0.0)]
    b = [(0.0, 1.0), (0.0, -1.0), (0.0, 1.0), (0.0, -1.0)]
    return a, b


# ---------------------------------------------------------------------------
# forms


def test_theta_examples():
    q = QuadConfig.of((F(1), F(0)), (F(3), F(1)), (F(2), F(4)), (F(-1), F(2)))
    a, b = _midpoint_dirs()
    assert all(theta(i, q, a) == 0 and theta(i, q, b) == 0 for i in range(4))
    trans = [(1, 0)] * 4
    z = q.z
    for i in range(4):
        assert theta(i, q, trans) == z[i][1] - z[(i + 1) % 4][1]
        assert theta(i, q, z) == z[(i + 1) % 4][0] * z[i][1] - z[i][0] * z[(i + 1) % 4][1]
        assert omega(i, q, trans) == 0


def test_omega_square_family_examples():
    x1, y1 = F(3, 10), F(-2, 5)
    q = QuadConfig(tuple(square_orbit(x1, y1).z))
    # moving x1 alone along the family drags z2..z4 along: dz = (1, -1, 1, -1) in x
    dx = [(1, 0), (-1, 0), (1, 0), (-1, 0)]
    dy = [(0, 1), (0, -1), (0, 1), (0, -1)]
    assert omega(0, q, dx) == 2 * y1
    assert omega(0, q, dy) == -2 * (x1 - 1)


def test_coframe_round_trip_exact():
    rng = random.Random(4)
    for _ in range(200):
        while True:
            q = QuadConfig(tuple((F(rng.randint(-9, 9)), F(rng.randint(-9, 9))) for _ in range(4)))
            if all(d != 0 for d in q.deltas) and len(set(q.z)) == 4:
                break
        dq = [(F(rng.randint(-20, 20), rng.randint(1, 9)), F(rng.randint(-20, 20), rng.randint(1, 9))) for _ in range(4)]
        th = [theta(i, q, dq) for i in range(4)]
        om = [omega(i, q, dq) for i in range(4)]
        assert coframe_solve(q, th, om) == [tuple(p) for p in dq]


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=4, max_size=4),
       st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=4, max_size=4))
def test_coframe_round_trip_float(pts, dq):
    q = QuadConfig(tuple(pts))
    assume(min(abs(d) for d in q.deltas) > 1e-2)
    th = [theta(i, q, dq) for i in range(4)]
    om = [omega(i, q, dq) for i in range(4)]
    back = coframe_solve(q, th, om)
    scale = max(abs(d) for d in q.deltas)
    for p, r in zip(back, dq):
        assert p == pytest.approx(r, abs=1e-12 * scale / min(abs(d) for d in q.deltas) * 10 + 1e-12)


def test_coframe_zero_and_degenerate():
    assert coframe_solve(BASE, [0] * 4, [0] * 4) == [(0, 0)] * 4
    q = QuadConfig.of((0, 0), (1, 0), (2, 0), (0, 1))
    with pytest.raises(DegenerateQuadError):
        coframe_solve(q, [0] * 4, [0] * 4)


def test_delta_sums_are_twice_the_area_thousand_quads():
    rng = random.Random(17)
    for _ in range(1000):
        q = QuadConfig(tuple((F(rng.randint(-50, 50), 7), F(rng.randint(-50, 50), 3)) for _ in range(4)))
        d = q.deltas
        assert d[0] + d[2] == d[1] + d[3] == 2 * q.area


def test_square_family_deltas():
    rng = random.Random(8)
    for _ in range(50):
        x1, y1 = F(1, 2) + F(rng.randint(-99, 99), 1000), F(-1, 2) + F(rng.randint(-99, 99), 1000)
        d = square_orbit(x1, y1).deltas
        assert d[0] == 4 * (1 - x1) and d[1] == 4 * (y1 + 1)


def test_nondegeneracy_check():
    with pytest.raises(DegenerateQuadError):
        QuadConfig.of((0, 0), (0, 0), (1, 1), (0, 1)).check_nondegenerate()
    with pytest.raises(DegenerateQuadError):
        QuadConfig.of((0, 0), (1, 0), (2, 0), (0, 1)).check_nondegenerate()
    BASE.check_nondegenerate()


# ---------------------------------------------------------------------------
# families


def test_midpoint_family_base_and_theta():
    fp = midpoint_family(BASE, 0.1, 11)
    got = fp.config(0.0, 0.0).z
    assert all(abs(a - b) <= 1e-15 for p, q in zip(got, BASE.z) for a, b in zip(p, q))
    assert family_residual(fp) == 0.0


def test_midpoint_family_too_large():
    # z1 = z2 once z1 reaches the first midpoint (1, -0.4), i.e. s = 0.7
    with pytest.raises(FamilyError) as exc:
        midpoint_family(BASE, 0.7, 3)
    assert exc.value.s is not None and exc.value.t is not None


def test_midpoint_family_bad_arguments():
    with pytest.raises(ValueError):
        midpoint_family(BASE, 0.1, 1)
    with pytest.raises(ValueError):
        midpoint_family(BASE, -0.1, 5)


def test_rotation_family_is_not_integral():
    fp = rotation_family(BASE, (0.5, 0.5), 0.1, 5)
    assert family_residual(fp, h=1e-5, analytic=False) > 1e-3


def test_fd_tangents_also_annihilate_theta():
    fp = midpoint_family(BASE, 0.05, 5, bend=0.5)
    assert family_residual(fp) <= 1e-15
    # finite-difference tangents of a family are still family directions
    assert all(family_residual(fp, h=h, analytic=False) <= 1e-12 for h in (1e-2, 1e-3))


def test_fd_tangents_converge_at_second_order():
    fp = midpoint_family(BASE, 0.05, 3, bend=0.5)
    errs = []
    for h in (1e-2, 1e-3):
        worst = 0.0
        for s, t in fp.points():
            for fd, an in zip(fp.fd_tangents(s, t, h), fp.tangents(s, t)):
                worst = max(worst, max(abs(a - b) for p, q in zip(fd, an) for a, b in zip(p, q)))
        errs.append(worst)
    assert math.log10(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("bend", [0.0, 0.5])
def test_structure_residuals(bend):
    fp = midpoint_family(BASE, 0.04, 5, bend=bend)
    for h in (1e-2, 1e-3, 1e-4):
        r = structure_residuals(fp, h)
        assert r.theta <= 1e-12
        assert r.area_integral <= 1e-12
        for v in (r.dtheta, r.rel, r.dom, r.area_form):
            assert v <= 10 * h * h


def test_dom_converges_at_second_order():
    fp = midpoint_family(BASE, 0.04, 5, bend=0.5)
    hs = (1e-2, 1e-3, 1e-4)
    dom = [structure_residuals(fp, h).dom for h in hs]
    orders = [math.log10(dom[k] / dom[k + 1]) for k in range(2)]
    assert min(orders) >= 1.9


def test_base_area_integral_value():
    d = BASE.deltas
    assert d[0] + d[2] == pytest.approx(4.0, abs=1e-14)
    assert BASE.area == pytest.approx(2.0, abs=1e-14)


# ---------------------------------------------------------------------------
# integral elements


def test_integral_element_square_base():
    a, b = _midpoint_dirs()
    el = integral_element(BASE, a, b)
    assert el.case == "generic"
    assert el.v == pytest.approx(5 / 6, abs=1e-12)
    assert el.u == pytest.approx(1.0, abs=1e-12)
    assert el.genericity == pytest.approx(0.48, abs=1e-12)
    assert el.fit_residual <= 1e-12 and el.wedge_2413_residual <= 1e-12


def test_integral_element_deg_D():
    a, b = _midpoint_dirs()
    assert integral_element(square_orbit(0.5, -0.5), a, b).case == "deg_D"


def test_integral_element_deg_omega13():
    a, _ = _midpoint_dirs()
    assert integral_element(BASE, a, a).case == "deg_omega13"


def test_integral_element_rejects_non_integral_plane():
    trans = [(1.0, 0.0)] * 4
    a, _ = _midpoint_dirs()
    with pytest.raises(NotIntegralError):
        integral_element(BASE, trans, a)


@st.composite
def convex_quads(draw):
    angles = [k * 90 + draw(st.floats(5, 80)) for k in range(4)]
    rs = [draw(st.floats(1.0, 3.0)) for _ in range(4)]
    return QuadConfig(tuple((r * math.cos(math.radians(t)), r * math.sin(math.radians(t))) for r, t in zip(rs, angles)))


@given(convex_quads(), st.floats(-0.02, 0.02), st.floats(-0.02, 0.02))
def test_u_is_one_and_2413_holds_on_midpoint_families(q, s, t):
    assume(min(q.deltas) > 0.1)
    fp = midpoint_family(q, 0.03, 2, check=False)
    qq = fp.config(s, t)
    a, b = fp.tangents(s, t)
    el = integral_element(qq, a, b)
    assume(el.case == "generic" and abs(el.genericity) > 1e-3)
    if el.fit_residual <= 1e-10:
        assert el.wedge_2413_residual <= 1e-8
    assert el.u == pytest.approx(1.0, abs=1e-8)


def test_theta56_on_family_and_generic():
    a, b = _midpoint_dirs()
    for d in (a, b):
        assert all(abs(v) <= 1e-10 for v in theta56(BASE, d))
    rng = np.random.default_rng(1)
    dq = [tuple(p) for p in rng.normal(size=(4, 2))]
    assert max(abs(v) for v in theta56(BASE, dq)) > 1e-3


def test_theta56_rank_two():
    rng = np.random.default_rng(2)
    for _ in range(50):
        q = QuadConfig(tuple(tuple(p) for p in rng.normal(size=(4, 2))))
        if min(abs(d) for d in q.deltas) < 1e-2:
            continue
        assert np.linalg.matrix_rank(theta56_matrix(q)) == 2


def test_tangency_direction():
    a, b = _midpoint_dirs()
    assert all(tangency_direction(BASE, d, i) == 0 for d in (a, b) for i in range(4))
    q = QuadConfig.of((1.0, 0.0), (2.0, 0.0), (1.0, 2.0), (0.0, 1.0))
    assert tangency_direction(q, q.z, 0) == pytest.approx(1.5)
    with pytest.raises(NotIntegralError):
        tangency_direction(BASE, [(1.0, 0.0)] * 4, 1)


# ---------------------------------------------------------------------------
# dDelta relations


def test_ddelta_small_on_square_family():
    fp = midpoint_family(BASE, 0.04, 5)
    assert ddelta_check(fp, 1e-4) <= 1e-6
    v = lambda q: 1 / (q.deltas[1] - q.deltas[2])
    assert ddelta_check(fp, 1e-4, v=v) <= 1e-6


def test_ddelta_second_order():
    fp = midpoint_family(BASE, 0.04, 5, bend=0.5)
    r = [ddelta_check(fp, h) for h in (1e-2, 1e-3)]
    assert r[1] <= r[0] / 50


def test_ddelta_is_large_for_wrong_v():
    fp = midpoint_family(BASE, 0.04, 3)
    assert ddelta_check(fp, 1e-4, v=lambda q: 0.0) > 1e-2


def test_family_check_report_shape():
    fp = midpoint_family(BASE, 0.04, 3)
    rep = family_check_report(fp, hs=(1e-2, 1e-3))
    assert len(rep["levels"]) == 2 and len(rep["v"]) == 9
    assert all(abs(u - 1) <= 1e-8 for u in rep["u"])
    assert rep["theta_residual"] == 0.0
