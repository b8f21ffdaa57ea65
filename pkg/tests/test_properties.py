"""Invariants checked on randomly generated poc sets."""
import json
from itertools import combinations

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

import oracles
from medianite.catalog import random_pocset
from medianite.dual import enumerate_ultrafilters, flip, is_coherent, min_elements, vertex_bits
from medianite.errors import AxiomViolation
from medianite.jsonio import pocset_from_document, pocset_to_document
from medianite.metrics import (
    distance_matrix,
    halfspace_vertices,
    interval_contains,
    is_convex_vertexset,
    median_vertices,
    normal_cube_path,
    unit_linf_matrix,
)
from medianite.pocset import PocElement, build_from_generators
from medianite.refine import deformation_bound_check, refine, subdivision_isometry_check

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def generated(draw, max_walls=6):
    """Poc set from random generating relations, with random weights."""
    n = draw(st.integers(1, max_walls))
    codes = st.integers(0, 2 * n - 1)
    rels = draw(st.lists(st.tuples(codes, codes).filter(lambda t: t[0] >> 1 != t[1] >> 1), max_size=2 * n))
    weights = draw(st.lists(st.floats(0.1, 3.0), min_size=n, max_size=n))
    try:
        return build_from_generators(n, [(PocElement.from_code(a), PocElement.from_code(b)) for a, b in rels],
                                     weights)
    except AxiomViolation:
        assume(False)


@st.composite
def subset_pocsets(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    p = random_pocset(np.random.default_rng(seed), max_walls=7)
    w = draw(st.lists(st.floats(0.1, 3.0), min_size=p.n_walls, max_size=p.n_walls))
    return p.with_weights(w)


pocsets = st.one_of(generated(), subset_pocsets())


@SETTINGS
@given(pocsets)
def test_enumeration_matches_brute_force(p):
    assert enumerate_ultrafilters(p) == oracles.ultrafilters(p)
    assert np.array_equal(vertex_bits(p, mode="bfs"), vertex_bits(p, mode="exhaustive"))


@SETTINGS
@given(pocsets, st.data())
def test_flip_is_an_involution(p, data):
    verts = enumerate_ultrafilters(p)
    u = verts[data.draw(st.integers(0, len(verts) - 1))]
    for a in min_elements(p, u):
        v = flip(p, u, a)
        assert is_coherent(p, v) and flip(p, v, a.star) == u


@SETTINGS
@given(pocsets, st.data())
def test_median_axioms(p, data):
    verts = enumerate_ultrafilters(p)
    pick = st.integers(0, len(verts) - 1)
    x, y, z = (verts[data.draw(pick)] for _ in range(3))
    m = median_vertices(p, x, y, z)
    assert is_coherent(p, m)
    assert median_vertices(p, x, x, y) == x
    assert median_vertices(p, y, z, x) == m == median_vertices(p, z, x, y)
    for a, b in ((x, y), (y, z), (x, z)):
        assert interval_contains(p, a, b, m)


@SETTINGS
@given(pocsets)
def test_metric_axioms(p):
    l1 = distance_matrix(p, "l1")
    linf = distance_matrix(p, "linf")
    for D in (l1, linf):
        assert np.allclose(D, D.T) and not np.diag(D).any()
        assert (D[:, :, None] <= D[:, None, :] + D[None, :, :] + 1e-9).all()
    off = ~np.eye(len(l1), dtype=bool)
    assert (linf[off] > 0).all()
    assert (linf <= l1 + 1e-9).all()


@SETTINGS
@given(pocsets)
def test_linf_against_exhaustive_chains(p):
    verts = enumerate_ultrafilters(p)[:10]
    D = distance_matrix(p, "linf", vertices=verts)
    for i, j in combinations(range(len(verts)), 2):
        sep = oracles.separator(verts[i], verts[j])
        want = oracles.max_nested_weight(p, sep, lambda e: p.weights[e.wall])
        assert abs(D[i, j] - want) < 1e-9


@SETTINGS
@given(pocsets)
def test_normal_path_length_is_unit_linf(p):
    verts = enumerate_ultrafilters(p)
    D = unit_linf_matrix(p)
    for i, u in enumerate(verts):
        for j, v in enumerate(verts):
            assert normal_cube_path(p, u, v).n_steps == round(D[i, j])


@SETTINGS
@given(pocsets)
def test_halfspaces_are_convex(p):
    for code in range(p.n_elements):
        assert is_convex_vertexset(p, halfspace_vertices(p, code))


@SETTINGS
@given(pocsets, st.data())
def test_convexity_matches_hull(p, data):
    verts = enumerate_ultrafilters(p)
    idx = data.draw(st.sets(st.integers(0, len(verts) - 1), min_size=1))
    s = {verts[i] for i in idx}
    hull = oracles.convex_hull(p, verts, s)
    assert is_convex_vertexset(p, s) == (hull == s)


@SETTINGS
@given(pocsets, st.data())
def test_random_refinement_is_isometric(p, data):
    splits = {}
    for i in range(p.n_walls):
        k = data.draw(st.integers(1, 3))
        parts = np.array(data.draw(st.lists(st.floats(0.1, 1.0), min_size=k, max_size=k)))
        splits[i] = list(parts / parts.sum() * p.weights[i])
    r = refine(p, splits)
    assert subdivision_isometry_check(r).passed


@SETTINGS
@given(pocsets, st.data())
def test_deformation_bound(p, data):
    w = data.draw(st.lists(st.floats(0.0, 3.0), min_size=p.n_walls, max_size=p.n_walls))
    assert deformation_bound_check(p, p.weights, w).passed


@SETTINGS
@given(pocsets)
def test_document_round_trip(p):
    doc = json.loads(json.dumps(pocset_to_document(p)))
    assert pocset_from_document(doc) == p
