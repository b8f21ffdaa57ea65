"""Acceptance suite.

Each criterion is a function returning ``(ok, detail)``.  Under pytest every
criterion prints one ``PASS``/``FAIL`` line; ``python3 tests/test_acceptance.py``
prints the same lines without pytest.
"""
from __future__ import annotations

import sys
import time

import numpy as np
import pytest

from medianite.catalog import catalog
from medianite.dual import Ultrafilter, coordinates, enumerate_ultrafilters, vertex_bits
from medianite.metrics import (
    distance_matrix,
    l1_distance_vertices,
    linf_distance_vertices,
    median_vertices,
    normal_cube_path,
    unit_linf_matrix,
)
from medianite.pocset import linear_pocset, reduce_degenerate, transverse_pocset, wedge_sum, xt_pocset
from medianite.refine import (
    deformation_bound_check,
    lower_rational_approximation,
    normal_path_excess,
    refine,
    subdivision_isometry_check,
)
from medianite.verify import (
    BallFamily,
    ball_separation_sweep,
    check_dagger,
    helly_sweep,
    hyperconvexity_check,
    metric_from_pocset,
    oracle_sweep,
)

_CATALOG = None


def _cat():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = catalog()
    return _CATALOG


def _unit(p):
    return p.with_weights(np.ones(p.n_walls))


def _timed(limit):
    def deco(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            if limit is not None and dt >= limit:
                return False, f"{detail}; took {dt:.1f}s, limit {limit}s"
            return ok, f"{detail}; {dt:.1f}s"
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


@_timed(10)
def criterion_1():
    """Halfspace containment V(a) < V(b) iff a < b."""
    cat = _cat()
    if len(cat) < 50:
        return False, f"catalog has only {len(cat)} poc sets"
    bad = []
    for name, p in cat:
        B = vertex_bits(p)
        side = np.empty((p.n_elements, len(B)), dtype=bool)
        side[0::2] = (B == 0).T
        side[1::2] = (B == 1).T
        sub = (side[:, None, :] <= side[None, :, :]).all(axis=2)
        proper = sub & (side.sum(axis=1)[:, None] < side.sum(axis=1)[None, :])
        if not np.array_equal(proper, p.strict):
            bad.append(name)
    return not bad, f"{len(cat)} poc sets, mismatches {bad}"


@_timed(60)
def criterion_2():
    """Unit l-infinity formula against the cube-diagonal oracle at n = 8 and 16."""
    bad, worst = [], 0.0
    for name, p in _cat():
        rep = oracle_sweep(_unit(p), (8, 16))
        worst = max(worst, max(r["max_deviation"] for r in rep.details["sweep"]))
        if not rep.passed:
            bad.append(name)
    return not bad, f"failures {bad}, largest deviation {worst}"


@_timed(None)
def criterion_3():
    """Normal cube path step count equals the unit l-infinity distance."""
    bad, pairs = [], 0
    for name, p in _cat():
        q = _unit(p)
        verts = enumerate_ultrafilters(q)
        D = unit_linf_matrix(q)
        for i, u in enumerate(verts):
            for j, v in enumerate(verts):
                pairs += 1
                if normal_cube_path(q, u, v).n_steps != int(round(D[i, j])):
                    bad.append((name, str(u), str(v)))
    return not bad, f"{pairs} pairs, mismatches {bad[:3]}"


@_timed(None)
def criterion_4():
    """Every integer-radius l-infinity ball is l1-convex."""
    bad = [name for name, p in _cat() if not check_dagger(p).passed]
    return not bad, f"failures {bad}"


DOCUMENTED = [(1, 1, 0), (1, 0, 1), (0, 1, 1), (0, 0, 0)]


@_timed(None)
def criterion_5():
    """Hyperconvexity holds for l-infinity and fails for the l1 cube."""
    bad = []
    for name, p in _cat():
        rep = hyperconvexity_check(metric_from_pocset(p, "linf", weighted=False), 1.0, 4)
        if not rep.passed:
            bad.append(name)
    cube = transverse_pocset(3)
    m = metric_from_pocset(cube, "l1")
    rep = hyperconvexity_check(m, 1.0, 4)
    base = enumerate_ultrafilters(cube)[0]
    verts = enumerate_ultrafilters(cube)
    coord = {str(u): tuple(int(x) for x in coordinates(cube, base, u).to_array()) for u in verts}
    label = {c: s for s, c in coord.items()}
    target = sorted(DOCUMENTED)
    found = [sorted(coord[c] for c in f["centers"]) for f in rep.details.get("counterexamples", [])
             if f["radii"] == [1.0] * 4]
    fam = BallFamily(tuple(m.labels.index(label[c]) for c in DOCUMENTED), (1.0,) * 4)
    direct = fam.is_admissible(m) and not fam.intersection(m)
    ok = not bad and rep.status == "fail" and target in found and direct
    return ok, (f"linf failures {bad}; l1 cube status {rep.status}, first witness {rep.witness}, "
                f"documented family reported {target in found}, direct check {direct}")


@_timed(None)
def criterion_6():
    """X_t leaf distances and medians."""
    problems = []
    leaves = {"A": "+---+++", "B": "-+--+--", "C": "--+--+-", "D": "---+--+"}
    c_str, d_str = "----++-", "----+-+"
    for t in (0.0, 0.25, 0.5, 1.0):
        p = xt_pocset(t)
        U = {k: Ultrafilter.from_string(s) for k, s in leaves.items()}
        for a in "ABCD":
            for b in "ABCD":
                if a < b and abs(l1_distance_vertices(p, U[a], U[b]) - 2.0) > 1e-9:
                    problems.append((t, a, b))
        c = median_vertices(p, U["A"], U["B"], U["C"])
        d = median_vertices(p, U["A"], U["B"], U["D"])
        if str(c) != c_str or str(d) != d_str:
            problems.append((t, "median", str(c), str(d)))
        gap = l1_distance_vertices(p, c, d)
        if t > 0 and not gap > 1e-9:
            problems.append((t, "c equals d"))
        if t == 0:
            red, keep = reduce_degenerate(p)
            proj = lambda u: tuple(u.sides[k] for k in sorted(keep))  # noqa: E731
            if proj(c) != proj(d) or gap > 1e-9:
                problems.append((t, "c and d differ after reduction"))
    return not problems, f"problems {problems}"


def _refinement_catalog():
    out = []
    for name, p in _cat():
        w = p.weights
        out.append((f"{name}/halves", refine(p, {i: [w[i] / 2] * 2 for i in range(p.n_walls)})))
        out.append((f"{name}/uneven", refine(p, {0: [0.2 * w[0], 0.3 * w[0], 0.5 * w[0]]})))
    square = transverse_pocset(2)
    out.append(("square/quarters", refine(square, {i: [0.25] * 4 for i in range(2)})))
    for t in (0.25, 0.5):
        out.append((f"xt{t}/approx4", lower_rational_approximation(xt_pocset(t), 4)[2]))
    return out


@_timed(30)
def criterion_7():
    """Refinements preserve l1 and l-infinity distances; the uneven grid is the hard case."""
    bad = [name for name, r in _refinement_catalog() if not subdivision_isometry_check(r).passed]
    grid = wedge_sum(linear_pocset(2), linear_pocset(1, prefix="b")).with_weights([1.0, 1.0, 2.0])
    r = refine(grid, {"b1": [1.0, 1.0]})
    iso = subdivision_isometry_check(r).passed
    excess_before, wit = normal_path_excess(grid)
    excess_after, _ = normal_path_excess(r.source)
    u, v = (Ultrafilter.from_string(s) for s in wit) if wit else (None, None)
    strict = wit is not None and normal_cube_path(grid, u, v).length_linf > linf_distance_vertices(grid, u, v)
    ok = not bad and iso and strict and excess_after == 0
    return ok, (f"{len(_refinement_catalog())} refinements, failures {bad}; uneven grid isometric {iso}, "
                f"normal path excess {excess_before} before and {excess_after} after refining")


@_timed(None)
def criterion_8():
    """Random weight perturbations move distances by at most the l1 weight change."""
    rng = np.random.default_rng(8)
    bad, runs = [], 0
    for name, p in _cat():
        for _ in range(100):
            u = rng.uniform(0.25, 2.0, p.n_walls)
            w = np.clip(u + rng.uniform(-1, 1, p.n_walls) * rng.uniform(0, 0.75), 0.0, None)
            rep = deformation_bound_check(p, u, w)
            runs += 1
            # the report decides near-tight pairs in exact rational arithmetic
            if not rep.passed:
                bad.append((name, rep.details["max_deviation"], rep.bound))
    return not bad, f"{runs} perturbations, violations {bad[:3]}"


@_timed(None)
def criterion_9():
    """Ball separation witnesses verify for every pair and radius."""
    bad, checked = [], 0
    for name, p in _cat():
        rep = ball_separation_sweep(_unit(p))
        checked += rep.details.get("pairs_checked", 0)
        if not rep.passed:
            bad.append((name, rep.witness))
    return not bad, f"{checked} (pair, radius) cases, failures {bad}"


@_timed(60)
def criterion_10():
    """Helly for families of at most four sets V(A) with |A| <= 2."""
    bad, fams = [], 0
    for name, p in _cat():
        rep = helly_sweep(p, 4, 2)
        fams += rep.details["families_checked"]
        if not rep.passed:
            bad.append((name, rep.witness))
    return not bad, f"{fams} families, failures {bad}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _line(i, fn, ok, detail):
    return f"criterion {i:2d} {'PASS' if ok else 'FAIL'}: {fn.__doc__.strip()} ({detail})"


@pytest.mark.parametrize("idx", range(1, len(CRITERIA) + 1), ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(idx, capsys):
    fn = CRITERIA[idx - 1]
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(idx, fn, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        failed += not ok
        print(_line(i, fn, ok, detail))
    sys.exit(1 if failed else 0)
