import json
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from outer_billiard.geometry import (
    InteriorPointError,
    TableError,
    cross,
    ellipse,
    ellipse_tangency,
    load_table,
    parallelogram_corners,
    polygon,
    tangency,
)

from .conftest import SQUARE

F = Fraction


# ---------------------------------------------------------------------------
# loading and validation


def test_load_exact_polygon():
    t = load_table('{"type":"polygon","vertices":[["0","0"],["1/2","0"],["1/2","1/3"]]}')
    assert t.exact and t.vertices[1] == (F(1, 2), F(0))


def test_decimal_literals_are_exact_rationals():
    t = load_table('{"type":"polygon","vertices":[[0,0],[0.1,0],[0.1,0.1]]}')
    assert t.exact and t.vertices[1][0] == F(1, 10)
    tf = load_table('{"type":"polygon","vertices":[[0,0],[0.1,0],[0.1,0.1]]}', mode="float")
    assert not tf.exact and tf.vertices[1][0] == 0.1


def test_mixed_coordinates_rejected():
    with pytest.raises(TableError, match="mixes"):
        load_table('{"type":"polygon","vertices":[["0","0"],[1,0],["1","1"]]}')


def test_ellipse_is_float_only():
    t = load_table('{"type":"ellipse","center":[0,0],"semi_axes":[2,1]}')
    assert t.kind == "ellipse" and t.semi_axes == (2.0, 1.0)
    with pytest.raises(TableError):
        load_table('{"type":"ellipse","center":[0,0],"semi_axes":[2,1]}', mode="exact")


@pytest.mark.parametrize(
    "text",
    ["not json", '{"vertices": []}', '{"type":"circle"}', '{"type":"polygon","vertices":[[0,0],[1]]}'],
)
def test_malformed_tables(text):
    with pytest.raises(TableError):
        load_table(text)


def test_collinear_vertex_reported():
    with pytest.raises(TableError) as exc:
        polygon([(0, 0), (1, 0), (2, 0), (1, 1)])
    assert exc.value.vertex == 1


def test_clockwise_rejected_or_reoriented():
    cw = list(reversed(SQUARE))
    with pytest.raises(TableError, match="clockwise"):
        polygon(cw)
    t = polygon(cw, reorient=True)
    assert t.reoriented
    area2 = sum(cross(*t.vertices[i], *t.vertices[(i + 1) % 4]) for i in range(4))
    assert area2 > 0


def test_pentagram_rejected():
    star = [(math.cos(4 * math.pi * k / 5), math.sin(4 * math.pi * k / 5)) for k in range(5)]
    with pytest.raises(TableError):
        polygon(star, exact=False)


def test_repeated_vertex():
    with pytest.raises(TableError):
        polygon([(0, 0), (1, 0), (1, 0), (0, 1)])


def test_table_json_roundtrip(square):
    again = load_table(json.dumps(square.to_json()))
    assert again == square


# ---------------------------------------------------------------------------
# tangency


def test_square_tangencies(square):
    assert tangency(square, (F(3, 10), F(-2, 5))).tau == (1, 0)
    assert tangency(square, (F(17, 10), F(2, 5))).tau == (1, 1)


def test_singular_point_on_backward_edge_ray(square):
    # the ray from (0, 0) away from (1, 0) carries both candidates
    r = tangency(square, (-1, 0))
    assert r.singular
    assert not tangency(square, (2, 0)).singular


def test_interior_and_boundary_rejected(square, circle):
    for z in [(F(1, 2), F(1, 2)), (1, 0), (F(1, 2), 0)]:
        with pytest.raises(InteriorPointError):
            tangency(square, z)
    with pytest.raises(InteriorPointError):
        tangency(circle, (0.5, 0.0))


def test_circle_tangency_closed_form(circle):
    r = tangency(circle, (2.0, 0.0))
    assert r.tau == pytest.approx((0.5, math.sqrt(3) / 2), abs=1e-13)
    r = tangency(circle, (0.0, 2.0))
    assert r.tau == pytest.approx((-math.sqrt(3) / 2, 0.5), abs=1e-13)


@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(1.05, 20.0), st.floats(-math.pi, math.pi))
def test_ellipse_tangency_is_tangent_and_left(a, b, d, ang):
    table = ellipse((0.5, -0.25), (a, b))
    z = (0.5 + d * a * math.cos(ang), -0.25 + d * b * math.sin(ang))
    r = ellipse_tangency(table, z)
    t = r.parameter
    tx, ty = -a * math.sin(t), b * math.cos(t)
    gx, gy = r.tau[0] - z[0], r.tau[1] - z[1]
    scale = math.hypot(gx, gy) * math.hypot(tx, ty)
    assert abs(cross(gx, gy, tx, ty)) <= 1e-10 * scale
    # center lies strictly left of z -> tau
    assert cross(gx, gy, 0.5 - z[0], -0.25 - z[1]) > 0


@st.composite
def convex_polygons(draw, min_n=4, max_n=8):
    # one vertex per angular sector keeps every turn below pi
    n = draw(st.integers(min_n, max_n))
    sector = 360 / n
    angles = [k * sector + draw(st.floats(0, sector * 0.9)) for k in range(n)]
    rx, ry = draw(st.integers(2, 9)), draw(st.integers(2, 9))
    pts = [(F(round(rx * 1000 * math.cos(math.radians(t)))), F(round(ry * 1000 * math.sin(math.radians(t))))) for t in angles]
    try:
        return polygon(pts)
    except TableError:
        assume(False)


def _outside_point(table, draw_x, draw_y):
    z = (F(draw_x), F(draw_y))
    assume(not table.contains(z))
    return z


@given(convex_polygons(), st.integers(-30000, 30000), st.integers(-30000, 30000))
def test_tangency_invariant_all_vertices_left(table, x, y):
    z = _outside_point(table, x, y)
    r = tangency(table, z)
    assume(not r.singular)
    tau = r.tau
    for j, w in enumerate(table.vertices):
        if j != r.index:
            assert cross(tau[0] - z[0], tau[1] - z[1], w[0] - z[0], w[1] - z[1]) > 0


@given(
    convex_polygons(),
    st.integers(-30000, 30000),
    st.integers(-30000, 30000),
    st.tuples(st.integers(3, 6), st.integers(-2, 2), st.integers(-2, 2), st.integers(3, 6)),
    st.integers(0, 3),
    st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
)
def test_tangency_affine_equivariance(table, x, y, m, quarter_turns, shift):
    a, b, c, d = m  # det >= 5
    for _ in range(quarter_turns):
        a, b, c, d = -c, -d, a, b
    z = _outside_point(table, x, y)

    def f(p):
        return (a * p[0] + b * p[1] + shift[0], c * p[0] + d * p[1] + shift[1])

    r = tangency(table, z)
    img = polygon([f(v) for v in table.vertices])
    r2 = tangency(img, f(z))
    assert r2.singular == r.singular
    if not r.singular:
        assert r2.index == r.index


@given(convex_polygons(), st.integers(-30000, 30000), st.integers(-30000, 30000))
def test_float_and_exact_tangency_agree_away_from_singular_lines(table, x, y):
    z = _outside_point(table, x, y)
    r = tangency(table, z)
    assume(not r.singular)
    # distance from z to the two neighbouring candidate lines
    diam = table.diameter()
    tau = r.tau
    for w in table.vertices:
        if w == tau:
            continue
        c = float(cross(tau[0] - z[0], tau[1] - z[1], w[0] - z[0], w[1] - z[1]))
        dist = abs(c) / math.hypot(float(w[0] - tau[0]), float(w[1] - tau[1]))
        assume(dist > 1e-6 * diam)
    tf = polygon(table.vertices, exact=False)
    rf = tangency(tf, (float(z[0]), float(z[1])))
    assert rf.index == r.index and not rf.singular


# ---------------------------------------------------------------------------
# parallelograms


def test_parallelogram_corners_examples(square, quad, hexagon_float):
    assert parallelogram_corners(square) == [(0, 1, 2, 3)]
    assert parallelogram_corners(quad) == []
    assert parallelogram_corners(hexagon_float) == [(0, 1, 3, 4), (0, 2, 3, 5), (1, 2, 4, 5)]


def test_parallelogram_corners_brute_force_oracle():
    import random

    rng = random.Random(7)
    for _ in range(30):
        pts = [(F(rng.randint(-6, 6)), F(rng.randint(-6, 6))) for _ in range(14)]
        # convex hull by monotone chain as an independent construction
        pts = sorted(set(pts))
        def half(seq):
            h = []
            for p in seq:
                while len(h) >= 2 and cross(h[-1][0] - h[-2][0], h[-1][1] - h[-2][1], p[0] - h[-2][0], p[1] - h[-2][1]) <= 0:
                    h.pop()
                h.append(p)
            return h
        hull = half(pts)[:-1] + half(pts[::-1])[:-1]
        if len(hull) < 4:
            continue
        t = polygon(hull)
        vs = t.vertices
        expected = set()
        n = len(vs)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        if len({i, j, k, l}) == 4 and i < j < k < l:
                            if vs[i][0] + vs[k][0] == vs[j][0] + vs[l][0] and vs[i][1] + vs[k][1] == vs[j][1] + vs[l][1]:
                                expected.add((i, j, k, l))
        assert set(parallelogram_corners(t)) == expected
