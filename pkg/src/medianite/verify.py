"""Independent oracles and verification sweeps.

Every sweep returns a :class:`~medianite.reports.Report`.  Family searches
(hyperconvexity, Helly) visit families in order of size, then
lexicographically.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .dual import Ultrafilter, _bits_of, _keys, _minimal, vertex_bits
from .errors import GridTooFine, NotSeparated
from .metrics import (
    _convexity_violation,
    distance_matrix,
    linf_unit_distance,
    normal_cube_path,
    unit_linf_matrix,
    vertex_index,
)
from .pocset import PocElement, PocSet, reduce_degenerate
from .refine import _floor_counts, lower_rational_approximation, pull_back_vertex
from .reports import FAIL, NOT_APPLICABLE, PASS, Report

DEFAULT_BUDGET = 500_000_000
TOL = 1e-12


def work_budget() -> int:
    raw = os.environ.get("MEDIANITE_BUDGET")
    return int(float(raw)) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class FiniteMetric:
    labels: tuple[str, ...]
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        n = len(self.labels)
        if d.shape != (n, n):
            raise ValueError("distance matrix shape does not match labels")
        if np.any(d < 0) or np.any(np.abs(np.diag(d)) > 0) or not np.allclose(d, d.T, atol=1e-12, rtol=0):
            raise ValueError("distance matrix must be symmetric, nonnegative, zero on the diagonal")
        if n and np.any(d[:, None, :] > d[:, :, None] + d[None, :, :] + 1e-9):
            raise ValueError("triangle inequality fails")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "d", d)

    def __len__(self):
        return len(self.labels)

    @property
    def diameter(self) -> float:
        return float(self.d.max()) if len(self) else 0.0


@dataclass(frozen=True)
class BallFamily:
    centers: tuple[int, ...]
    radii: tuple[float, ...]

    def is_admissible(self, m: FiniteMetric, tol: float = TOL) -> bool:
        for i, j in combinations(range(len(self.centers)), 2):
            if self.radii[i] + self.radii[j] < m.d[self.centers[i], self.centers[j]] - tol:
                return False
        return True

    def intersection(self, m: FiniteMetric, tol: float = TOL) -> list[int]:
        ok = np.ones(len(m), dtype=bool)
        for c, r in zip(self.centers, self.radii):
            ok &= m.d[c] <= r + tol
        return [int(i) for i in np.nonzero(ok)[0]]

    def describe(self, m: FiniteMetric) -> dict:
        return {"centers": [m.labels[c] for c in self.centers], "radii": [float(r) for r in self.radii]}


def metric_from_pocset(p: PocSet, metric: str = "linf", weighted: bool = True) -> FiniteMetric:
    labels = tuple("".join("-" if b else "+" for b in row) for row in vertex_bits(p))
    return FiniteMetric(labels, distance_matrix(p, metric, weighted=weighted))


# -- cube-diagonal oracle -------------------------------------------------------------

def _diagonal_graph(q: PocSet) -> csr_matrix:
    """Graph on the vertices of ``q`` joining any two corners of a common cube.

    From each vertex every nonempty transverse subset of its minimal elements
    is flipped; the edge length is the largest weight flipped (the in-cube
    l-infinity distance between opposite corners of that face).
    """
    B = vertex_bits(q)
    keys = _keys(B)
    N, m = B.shape
    M = _minimal(q, B)
    # single flips: F[v, code] is the neighbour across the minimal element code
    rows, codes = np.nonzero(M)
    tgt = B[rows].copy()
    tgt[np.arange(len(rows)), codes >> 1] ^= 1
    F = np.full((N, 2 * m), -1, dtype=np.int64)
    F[rows, codes] = np.searchsorted(keys, _keys(tgt))
    del tgt
    # minimal elements of each vertex, packed into k positions
    k = int(M.sum(axis=1).max()) if N else 0
    order = np.argsort(~M, axis=1, kind="stable")[:, :k]
    valid = np.take_along_axis(M, order, axis=1)
    nest = q.nested_matrix
    npos = nest[order[:, :, None], order[:, None, :]]
    pos = np.arange(k)
    w = q.weights

    v, i = np.nonzero(valid)
    cur = F[v, order[v, i]]
    cost = w[order[v, i] >> 1]
    allowed = valid[v] & (pos[None, :] > i[:, None]) & ~npos[v, i]
    src_all, dst_all, len_all = [], [], []
    while len(v):
        keep = cur > v
        src_all.append(v[keep])
        dst_all.append(cur[keep])
        len_all.append(cost[keep])
        r2, j = np.nonzero(allowed)
        v = v[r2]
        c = order[v, j]
        cur = F[cur[r2], c]
        cost = np.maximum(cost[r2], w[c >> 1])
        allowed = allowed[r2] & (pos[None, :] > j[:, None]) & ~npos[v, j]
    src = np.concatenate(src_all) if src_all else np.zeros(0, int)
    dst = np.concatenate(dst_all) if dst_all else np.zeros(0, int)
    lens = np.concatenate(len_all) if len_all else np.zeros(0)
    if np.any(dst < 0):
        raise RuntimeError("flip left the vertex set")
    return csr_matrix((lens, (src, dst)), shape=(N, N))


def _approximation(p: PocSet, n: int):
    """Unit refinement for the ``n``-th approximation, dropping vanished walls."""
    counts = _floor_counts(p, n)
    reduced, keep = reduce_degenerate(p.with_weights(counts.astype(float)))
    kept = sorted(keep)
    if not reduced.n_walls:
        return None, kept
    q, _, r = lower_rational_approximation(reduced, 1)
    return (q, r), kept


def oracle_linf_matrix(p: PocSet, n: int, vertices: Sequence[Ultrafilter] | None = None) -> np.ndarray:
    """Rescaled cube-diagonal shortest paths between pulled-back vertices."""
    if vertices is None:
        vertices = [Ultrafilter.from_bits(b) for b in vertex_bits(p)]
    key = ("oracle", n, tuple(vertices))
    if key in p._cache:
        return p._cache[key]
    approx, kept = _approximation(p, n)
    if approx is None:
        return np.zeros((len(vertices), len(vertices)))
    q, r = approx
    G = _diagonal_graph(q)
    pulled = [pull_back_vertex(r, Ultrafilter(tuple(u.sides[k] for k in kept))) for u in vertices]
    idx = [vertex_index(q, v) for v in pulled]
    uniq, inv = np.unique(idx, return_inverse=True)
    unit = bool(np.all(q.weights == 1))
    D = shortest_path(G, directed=False, unweighted=unit, indices=uniq)
    out = D[:, uniq][inv][:, inv] / n
    out.setflags(write=False)
    p._cache[key] = out
    return out


def oracle_linf_distance(p: PocSet, u: Ultrafilter, v: Ultrafilter, n: int) -> float:
    if u == v:
        return 0.0
    return float(oracle_linf_matrix(p, n, [u, v])[0, 1])


def oracle_bound(p: PocSet, n: int) -> float:
    return 2 * p.n_walls / n


# -- property (dagger) ------------------------------------------------------------

def check_dagger(p: PocSet) -> Report:
    """Every integer-radius unit l-infinity ball is l1-convex.

    Weights are ignored: both the unit l-infinity metric and l1-convexity are
    combinatorial once all weights are positive.
    """
    B = vertex_bits(p)
    D = unit_linf_matrix(p)
    diam = int(round(D.max())) if len(D) else 0
    n_balls = 0
    for c in range(len(B)):
        for r in range(diam + 1):
            members = D[c] <= r + 1e-9
            if members.all():
                break
            n_balls += 1
            bad = _convexity_violation(B, members)
            if bad is not None:
                x, y, z = bad
                lab = lambda i: _sign(B[i])  # noqa: E731
                return Report("dagger", FAIL, None,
                              {"center": lab(c), "radius": r, "triple": [lab(x), lab(y), lab(z)]},
                              {"balls_checked": n_balls})
    return Report("dagger", PASS, None, None, {"balls_checked": n_balls})


# -- family search shared by hyperconvexity and Helly ------------------------------

def _empty_families(masks: np.ndarray, compat: np.ndarray, max_family: int,
                    check_pairs: bool, budget: int | None, stats: dict):
    """Yield pairwise compatible families with empty intersection.

    ``masks`` is a packed ``(k, bytes)`` membership array.  Families come by
    size, then lexicographically.  Families of size ``s`` are only extended
    once no family of size ``s - 1`` has failed (a failing family's supersets
    are never reported).  ``stats["searched"]`` counts families tested.
    """
    CU = np.triu(compat, 1)
    stats.setdefault("searched", 0)
    if budget is not None and max_family >= 3:
        common = (CU.astype(np.float64) @ CU.T.astype(np.float64))[CU]
        est = float(common.sum()) + (float((common ** 2).sum()) if max_family >= 4 else 0.0)
        if est > budget:
            raise GridTooFine(f"family search needs about {est:.3g} steps, budget is {budget}")
    I, J = np.nonzero(CU)
    if max_family >= 2:
        inter = (masks[I] & masks[J]).any(axis=1)
        stats["searched"] += len(I)
        if check_pairs and not inter.all():
            for t in np.nonzero(~inter)[0]:
                yield int(I[t]), int(J[t])
            return
        I, J = I[inter], J[inter]
    for size in range(3, max_family + 1):
        failed = False
        for i, j in zip(I, J):
            K = np.nonzero(CU[i] & CU[j])[0]
            if not len(K):
                continue
            mij = masks[i] & masks[j]
            if size == 3:
                stats["searched"] += len(K)
                hit = ~(mij[None, :] & masks[K]).any(axis=1)
                for t in np.nonzero(hit)[0]:
                    failed = True
                    yield int(i), int(j), int(K[t])
            else:
                a, b = np.nonzero(CU[np.ix_(K, K)])
                if not len(a):
                    continue
                stats["searched"] += len(a)
                hit = ~(mij[None, :] & masks[K[a]] & masks[K[b]]).any(axis=1)
                for t in np.nonzero(hit)[0]:
                    failed = True
                    yield int(i), int(j), int(K[a[t]]), int(K[b[t]])
        if failed:
            return


def _collect(gen, limit: int) -> list:
    out = []
    for fam in gen:
        if out and len(fam) != len(out[0]):
            break
        out.append(fam)
        if len(out) >= limit:
            break
    return out


def _radii(diameter: float, step: float) -> np.ndarray:
    count = int(np.floor(diameter / step + 1e-9))
    return step * np.arange(count + 1)


def hyperconvexity_check(m: FiniteMetric, radii_step: float = 1.0, max_family: int = 4,
                         budget: int | None = None, max_witnesses: int = 256) -> Report:
    """Admissible ball families on the grid ``radii_step * N`` must share a point.

    Balls covering the whole space and repeated centers are skipped: neither
    can turn an admissible family with common points into one without.  On
    failure ``witness`` is the first counterexample and ``counterexamples``
    lists up to ``max_witnesses`` of the same size.
    """
    if radii_step <= 0:
        raise ValueError("radii step must be positive")
    budget = work_budget() if budget is None else budget
    N = len(m)
    balls = []
    for r in _radii(m.diameter, radii_step):
        for c in range(N):
            mask = m.d[c] <= r + TOL
            if not mask.all():
                balls.append((c, float(r), mask))
    bound = {"radii_step": radii_step, "max_family": max_family}
    if not balls:
        return Report("hyperconvex", PASS, bound, None, {"balls": 0, "families_checked": 0})
    cs = np.array([b[0] for b in balls])
    rs = np.array([b[1] for b in balls])
    masks = np.packbits(np.array([b[2] for b in balls]), axis=1)
    compat = (cs[:, None] != cs[None, :]) & (rs[:, None] + rs[None, :] >= m.d[np.ix_(cs, cs)] - TOL)
    stats: dict = {}
    fams = _collect(_empty_families(masks, compat, max_family, True, budget, stats), max_witnesses)
    details = {"balls": len(balls), "families_checked": stats["searched"]}
    if not fams:
        return Report("hyperconvex", PASS, bound, None, details)
    found = [BallFamily(tuple(int(cs[i]) for i in f), tuple(float(rs[i]) for i in f)).describe(m) for f in fams]
    details["counterexamples"] = found
    return Report("hyperconvex", FAIL, bound, found[0], details)


# -- Helly ------------------------------------------------------------------------------

def _vertex_mask(p: PocSet, s) -> np.ndarray:
    B = vertex_bits(p)
    if isinstance(s, np.ndarray) and s.dtype == bool:
        return s
    out = np.zeros(len(B), dtype=bool)
    for u in s:
        out[vertex_index(p, u)] = True
    return out


def helly_check(p: PocSet, family: Sequence) -> Report:
    """Pairwise intersecting convex vertex sets must have a common vertex."""
    B = vertex_bits(p)
    masks = [_vertex_mask(p, s) for s in family]
    for i, mk in enumerate(masks):
        if _convexity_violation(B, mk) is not None:
            return Report("helly", NOT_APPLICABLE, None, {"not_convex": i})
    for i, j in combinations(range(len(masks)), 2):
        if not (masks[i] & masks[j]).any():
            return Report("helly", NOT_APPLICABLE, None, {"disjoint_pair": [i, j]})
    common = np.logical_and.reduce(masks) if masks else np.ones(len(B), dtype=bool)
    if common.any():
        return Report("helly", PASS, None, {"common_vertex": _sign(B[np.argmax(common)])})
    return Report("helly", FAIL, None, {"family": list(range(len(masks)))})


def halfspace_intersections(p: PocSet, max_size: int = 2) -> list[tuple[tuple[PocElement, ...], np.ndarray]]:
    """Distinct nonempty sets ``V(A)`` for ``|A| <= max_size``, first labelling kept."""
    B = vertex_bits(p)
    side = np.empty((2 * p.n_walls, len(B)), dtype=bool)
    side[0::2] = (B == 0).T
    side[1::2] = (B == 1).T
    out, seen = [], set()
    for size in range(1, max_size + 1):
        for combo in combinations(range(2 * p.n_walls), size):
            mk = np.logical_and.reduce(side[list(combo)])
            key = mk.tobytes()
            if mk.any() and key not in seen:
                seen.add(key)
                out.append((tuple(PocElement.from_code(c) for c in combo), mk))
    return out


def helly_sweep(p: PocSet, max_family: int = 4, max_size: int = 2, budget: int | None = None) -> Report:
    """Helly over all families of ``V(A)``, ``|A| <= max_size``, of size at most ``max_family``."""
    sets = halfspace_intersections(p, max_size)
    budget = work_budget() if budget is None else budget
    bound = {"max_family": max_family, "max_size": max_size}
    if not sets:
        return Report("helly", PASS, bound, None, {"sets": 0, "families_checked": 0})
    masks = np.packbits(np.array([s[1] for s in sets]), axis=1)
    compat = (masks[:, None, :] & masks[None, :, :]).any(axis=2)
    stats: dict = {}
    fam = next(_empty_families(masks, compat, max_family, False, budget, stats), None)
    details = {"sets": len(sets), "families_checked": stats["searched"]}
    if fam is None:
        return Report("helly", PASS, bound, None, details)
    names = [[p.element_name(e) for e in sets[i][0]] for i in fam]
    return Report("helly", FAIL, bound, names, details)


# -- ball separation ---------------------------------------------------------------

def ball_separation_witness(p: PocSet, u: Ultrafilter, w: Ultrafilter, n: int) -> PocElement:
    """Element ``a`` of the last normal-cube-path step with ``ball(u, n) <= V(a)`` and ``w`` in ``V(a*)``."""
    if linf_unit_distance(p, u, w) <= n:
        raise NotSeparated(f"{u} and {w} are within unit l-infinity distance {n}")
    path = normal_cube_path(p, u, w)
    B = vertex_bits(p)
    row = unit_linf_matrix(p)[vertex_index(p, u)]
    ball = B[row <= n + 1e-9]
    wb = _bits_of(w)
    for a in sorted(path.steps[-1], key=lambda e: e.wall):
        bit = int(a.side < 0)
        if np.all(ball[:, a.wall] == bit) and wb[a.wall] != bit:
            return a
    raise NotSeparated(f"no element of the last step separates {w} from the ball of radius {n} about {u}")


def ball_separation_sweep(p: PocSet) -> Report:
    B = vertex_bits(p)
    D = unit_linf_matrix(p)
    count = 0
    for i in range(len(B)):
        u = Ultrafilter.from_bits(B[i])
        for j in range(len(B)):
            dist = int(round(D[i, j]))
            for n in range(dist):
                w = Ultrafilter.from_bits(B[j])
                try:
                    ball_separation_witness(p, u, w, n)
                except NotSeparated:
                    return Report("separation", FAIL, None, {"u": _sign(B[i]), "w": _sign(B[j]), "n": n})
                count += 1
    return Report("separation", PASS, None, None, {"pairs_checked": count})


def oracle_sweep(p: PocSet, ns: Iterable[int] = (8, 16), weighted: bool = False) -> Report:
    """Closed-form l-infinity matrix against the cube-diagonal oracle at each ``n``."""
    q = p if weighted else p.with_weights(np.ones(p.n_walls))
    exact = distance_matrix(q, "linf")
    rows, ok, witness = [], True, None
    B = vertex_bits(p)
    for n in ns:
        dev = np.abs(oracle_linf_matrix(q, n) - exact)
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        good = bool(dev[i, j] <= oracle_bound(q, n) + 1e-9)
        rows.append({"n": int(n), "bound": oracle_bound(q, n), "max_deviation": float(dev[i, j]), "pass": good})
        if not good and witness is None:
            witness = [_sign(B[i]), _sign(B[j])]
        ok &= good
    return Report("oracle", PASS if ok else FAIL, [r["bound"] for r in rows], witness, {"sweep": rows})


def _sign(bits) -> str:
    return "".join("-" if b else "+" for b in bits)
