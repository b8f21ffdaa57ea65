from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

import oracles
from medianite.dual import Point, Ultrafilter, enumerate_ultrafilters, vertex_bits
from medianite.errors import InvalidPoint
from medianite.metrics import (
    distance_matrix,
    halfspace_vertices,
    interval_contains,
    is_convex_vertexset,
    l1_distance_points,
    l1_distance_vertices,
    linf_ball_vertices,
    linf_distance_vertices,
    linf_unit_distance,
    linf_weighted_distance,
    linf_witness_chain,
    longest_chain,
    matrix_to_csv,
    median_points,
    median_vertices,
    normal_cube_path,
    separator,
    separator_vertices,
    unit_linf_matrix,
    vertex_index,
)
from medianite.pocset import PocElement, linear_pocset, transverse_pocset, wedge_sum, xt_pocset

U = Ultrafilter.from_string


def test_l1_matches_hamming_weight(cat):
    for _, p in cat:
        verts = enumerate_ultrafilters(p)
        D = distance_matrix(p, "l1")
        for i, j in combinations(range(len(verts)), 2):
            assert D[i, j] == pytest.approx(oracles.l1(p, verts[i], verts[j]))


def test_linf_matches_exhaustive_chain_search(cat):
    for name, p in cat:
        verts = enumerate_ultrafilters(p)
        if len(verts) > 24:
            verts = verts[:24]
        D = distance_matrix(p, "linf", vertices=verts)
        for i, j in combinations(range(len(verts)), 2):
            sep = oracles.separator(verts[i], verts[j])
            want = oracles.max_nested_weight(p, sep, lambda e: p.weights[e.wall])
            assert D[i, j] == pytest.approx(want), name
            assert linf_distance_vertices(p, verts[i], verts[j]) == pytest.approx(want)


def test_unit_linf_is_longest_chain():
    p = linear_pocset(4)
    assert linf_unit_distance(p, U("++++"), U("----")) == 4
    cube = transverse_pocset(4)
    assert linf_unit_distance(cube, U("++++"), U("----")) == 1
    assert unit_linf_matrix(cube).max() == 1


def test_witness_chain_is_a_chain(cat):
    for _, p in cat[:30]:
        verts = enumerate_ultrafilters(p)
        u, v = verts[0], verts[-1]
        chain = linf_witness_chain(p, u, v, weighted=True)
        sep = set(separator_vertices(p, u, v))
        assert set(chain) <= sep
        for a, b in zip(chain, chain[1:]):
            assert p.lt(a, b)
        assert sum(p.weights[e.wall] for e in chain) == pytest.approx(linf_distance_vertices(p, u, v))


def test_longest_chain_tie_prefers_small_wall():
    p = transverse_pocset(3)
    value, chain = longest_chain(p, [PocElement(2), PocElement(0), PocElement(1)])
    assert value == 1 and chain == [PocElement(0)]


def test_longest_chain_keeps_fractions():
    p = linear_pocset(2)
    value, _ = longest_chain(p, [PocElement(0), PocElement(1)], [Fraction(1, 3), Fraction(1, 6)])
    assert value == Fraction(1, 2)


def test_longest_chain_empty():
    assert longest_chain(linear_pocset(1), []) == (0.0, [])


def test_point_l1_in_square():
    sq = transverse_pocset(2)
    base = U("++")
    x = Point(base, ((0, 0.2),))
    y = Point(base, ((0, 0.7), (1, 1.0)))
    assert l1_distance_points(sq, x, y) == pytest.approx(1.5)
    assert linf_weighted_distance(sq, x, y) == pytest.approx(1.0)
    assert separator(sq, x, y).elements == {PocElement(0), PocElement(1)}


def test_point_linf_on_chain():
    p = linear_pocset(2)
    base = U("++")
    x = Point(base, ((0, 0.5),))
    y = Point(base, ((0, 1.0), (1, 0.25)))
    assert linf_weighted_distance(p, x, y) == pytest.approx(0.75)


def test_vertex_points_agree_with_vertex_metrics(cat):
    for _, p in cat[:25]:
        verts = enumerate_ultrafilters(p)
        u, v = verts[0], verts[-1]
        assert l1_distance_points(p, u, v) == pytest.approx(l1_distance_vertices(p, u, v))
        assert linf_weighted_distance(p, u, v) == pytest.approx(linf_distance_vertices(p, u, v))


def test_mismatched_basepoints():
    sq = transverse_pocset(2)
    with pytest.raises(ValueError):
        l1_distance_points(sq, Point(U("++")), Point(U("--")))


def test_xt_leaf_configuration():
    for t in (0.0, 0.25, 0.5, 1.0):
        p = xt_pocset(t)
        a, b, c, d = U("+---+++"), U("-+--+--"), U("--+--+-"), U("---+--+")
        for x, y in combinations([a, b, c, d], 2):
            assert l1_distance_vertices(p, x, y) == pytest.approx(2.0)
        m1 = median_vertices(p, a, b, c)
        m2 = median_vertices(p, a, b, d)
        assert str(m1) == "----++-" and str(m2) == "----+-+"
        assert l1_distance_vertices(p, m1, m2) == pytest.approx(2 * t)


def test_median_is_in_all_intervals(cat):
    for _, p in cat:
        verts = enumerate_ultrafilters(p)[:8]
        members = set(enumerate_ultrafilters(p))
        for x in verts:
            for y in verts:
                for z in verts:
                    m = median_vertices(p, x, y, z)
                    assert m in members
                    for a, b in ((x, y), (y, z), (x, z)):
                        assert interval_contains(p, a, b, m)


def test_median_points_on_square():
    sq = transverse_pocset(2)
    base = U("++")
    xs = [Point(base, ((0, 0.1),)), Point(base, ((1, 0.9),)), Point(base, ((0, 0.5), (1, 0.5)))]
    m = median_points(sq, *xs)
    assert m.coords == ((0, 0.1), (1, 0.5))


def test_median_points_rejects_invalid():
    p = linear_pocset(2)
    base = U("++")
    with pytest.raises(InvalidPoint):
        # crossing the second wall while sitting inside the first is incoherent
        median_points(p, Point(base, ((0, 0.5), (1, 0.5))), Point(base, ((0, 0.5), (1, 0.5))), Point(base))


def test_interval_matches_additivity(cat):
    for _, p in cat[:25]:
        verts = enumerate_ultrafilters(p)[:10]
        for u, v, z in ((u, v, z) for u in verts for v in verts for z in verts):
            add = abs(oracles.l1(p, u, z) + oracles.l1(p, z, v) - oracles.l1(p, u, v)) < 1e-9
            assert interval_contains(p, u, v, z) == add


def test_halfspaces_convex(cat):
    for _, p in cat:
        for code in range(p.n_elements):
            hs = halfspace_vertices(p, code)
            assert hs and is_convex_vertexset(p, hs)


def test_convexity_matches_hull_oracle():
    rng = np.random.default_rng(3)
    for p in (linear_pocset(3), transverse_pocset(3), xt_pocset(0.5),
              wedge_sum(linear_pocset(2), linear_pocset(2, prefix="b"))):
        verts = enumerate_ultrafilters(p)
        for _ in range(40):
            size = rng.integers(1, len(verts))
            s = {verts[i] for i in rng.choice(len(verts), size, replace=False)}
            hull = s
            for _ in range(len(verts)):
                hull = {z for z in verts if any(interval_contains(p, x, y, z) for x in hull for y in hull)}
            assert is_convex_vertexset(p, s) == (hull == s)


def test_grid_ball_equals_halfspace():
    grid = wedge_sum(linear_pocset(2), linear_pocset(1, prefix="b"))
    origin = U("+++")
    ball = linf_ball_vertices(grid, origin, 1)
    assert len(ball) == 4
    assert ball == halfspace_vertices(grid, PocElement(1))


def test_normal_path_on_examples():
    cube = transverse_pocset(3)
    path = normal_cube_path(cube, U("+++"), U("---"))
    assert path.n_steps == 1 and path.length_l1 == 3 and path.length_linf == 1
    chain = linear_pocset(3)
    path = normal_cube_path(chain, U("+++"), U("---"))
    assert [set(s) for s in path.steps] == [{PocElement(0)}, {PocElement(1)}, {PocElement(2)}]
    assert path.vertices[-1] == U("---")
    assert normal_cube_path(chain, U("+++"), U("+++")).n_steps == 0


def test_normal_path_length_equals_unit_linf(cat):
    for _, p in cat:
        q = p.with_weights(np.ones(p.n_walls))
        verts = enumerate_ultrafilters(q)
        D = unit_linf_matrix(q)
        for i in range(0, len(verts), 3):
            for j in range(len(verts)):
                path = normal_cube_path(q, verts[i], verts[j])
                assert path.n_steps == round(D[i, j])
                for step in path.steps:
                    for a, b in combinations(step, 2):
                        assert not oracles.is_nested_pair(q, a, b)


def test_weighted_normal_path_can_overshoot():
    grid = wedge_sum(linear_pocset(2), linear_pocset(1, prefix="b")).with_weights([1.0, 1.0, 2.0])
    u, v = U("+++"), U("---")
    path = normal_cube_path(grid, u, v)
    assert path.length_linf == 3.0
    assert linf_distance_vertices(grid, u, v) == 2.0


def test_matrix_symmetric_zero_diagonal(cat):
    for _, p in cat:
        for metric in ("l1", "linf"):
            D = distance_matrix(p, metric)
            assert np.allclose(D, D.T) and not np.diag(D).any()
            assert (D[:, :, None] <= D[:, None, :] + D.T[None, :, :] + 1e-9).all()


def test_unknown_metric():
    with pytest.raises(ValueError):
        distance_matrix(linear_pocset(1), "l2")


def test_vertex_index_round_trip(cat):
    for _, p in cat[:20]:
        for i, u in enumerate(enumerate_ultrafilters(p)):
            assert vertex_index(p, u) == i
    with pytest.raises(KeyError):
        vertex_index(linear_pocset(2), U("+-"))


def test_csv_layout():
    p = linear_pocset(1)
    text = matrix_to_csv(distance_matrix(p), ["+", "-"])
    assert text == ",+,-\n+,0,1\n-,1,0\n"
    assert len(vertex_bits(p)) == 2
