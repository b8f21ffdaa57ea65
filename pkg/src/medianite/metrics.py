"""Metric and median structure on the dual of a poc set.

Weighted l1 distances sum weights over the separator.  Weighted l-infinity
distances are the heaviest chain inside the separator, computed by a longest
path pass over a linear extension of the order.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dual import (
    Point,
    Ultrafilter,
    _bits_of,
    _keys,
    check_point,
    coordinates,
    is_coherent,
    vertex_bits,
)
from .pocset import PocElement, PocSet, _as_code


@dataclass(frozen=True)
class Separator:
    """Oriented elements on which two points differ, each on the first point's side."""

    elements: frozenset[PocElement]

    @property
    def walls(self) -> frozenset[int]:
        return frozenset(e.wall for e in self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements, key=lambda e: e.code))


@dataclass(frozen=True)
class BrokenPath:
    vertices: tuple[Ultrafilter, ...]
    steps: tuple[frozenset[PocElement], ...]
    length_l1: float
    length_linf: float

    @property
    def n_steps(self) -> int:
        return len(self.steps)


# -- linear extension used by every chain computation -------------------------

def _linear_extension(p: PocSet) -> np.ndarray:
    if "linext" not in p._cache:
        down = p.leq.sum(axis=0)  # number of elements below (inclusive)
        order = np.lexsort((np.arange(p.n_elements), down))
        p._cache["linext"] = order
    return p._cache["linext"]


def longest_chain(p: PocSet, elements: Iterable, weights: dict | Sequence[float] | None = None):
    """Heaviest chain among ``elements``.

    ``weights`` maps element code (or wall index, if a sequence of length
    ``n_walls``) to a nonnegative node weight; the default is one per element.
    Returns ``(total, chain)`` with the chain listed bottom-up.  Ties prefer the
    predecessor on the smallest wall index.
    """
    codes = sorted({_as_code(e) for e in elements})
    if not codes:
        return 0.0, []

    # weights are used as given so exact types (Fraction) pass through
    def w_of(c):
        if weights is None:
            return 1
        if isinstance(weights, dict):
            return weights[c]
        return weights[c >> 1]

    rank = {int(c): i for i, c in enumerate(_linear_extension(p))}
    codes.sort(key=lambda c: rank[c])
    best: dict[int, float] = {}
    prev: dict[int, int | None] = {}
    L = p.leq
    for c in codes:
        top, arg = 0, None
        for d in best:
            if d != c and L[d, c]:
                if best[d] > top or (best[d] == top and arg is not None and (d >> 1) < (arg >> 1)):
                    top, arg = best[d], d
        best[c] = top + w_of(c)
        prev[c] = arg
    end = max(best, key=lambda c: (best[c], -(c >> 1)))
    chain = []
    c: int | None = end
    while c is not None:
        chain.append(PocElement.from_code(c))
        c = prev[c]
    return best[end], chain[::-1]


def _pair_chain_values(p: PocSet, X: np.ndarray, Y: np.ndarray, node_w: np.ndarray) -> np.ndarray:
    """Heaviest chain in the separator for many pairs at once.

    ``X, Y`` are ``(k, n)`` bit matrices; ``node_w`` is ``(k, n)`` or ``(n,)``
    weights attached to each separating wall.
    """
    k, n = X.shape
    node_w = np.broadcast_to(np.asarray(node_w, dtype=float), (k, n))
    differ = X != Y
    best = np.zeros((k, 2 * n))
    S = p.strict
    for c in _linear_extension(p):
        w = c >> 1
        in_sep = differ[:, w] & (X[:, w] == (c & 1))
        if not in_sep.any():
            continue
        preds = np.nonzero(S[:, c])[0]
        below = best[:, preds].max(axis=1) if len(preds) else 0.0
        best[:, c] = np.where(in_sep, node_w[:, w] + below, 0.0)
    return best.max(axis=1) if n else np.zeros(k)


# -- vertex metrics ------------------------------------------------------------

def separator_vertices(p: PocSet, u: Ultrafilter, v: Ultrafilter) -> Separator:
    """Combinatorial separator ``u \\ v``."""
    return Separator(frozenset(PocElement(i, s) for i, (s, t) in enumerate(zip(u.sides, v.sides)) if s != t))


def l1_distance_vertices(p: PocSet, u: Ultrafilter, v: Ultrafilter) -> float:
    a, b = _bits_of(u), _bits_of(v)
    return float(p.weights[a != b].sum())


def linf_unit_distance(p: PocSet, u: Ultrafilter, v: Ultrafilter) -> int:
    """Longest chain in ``u \\ v`` (the unit l-infinity metric; weights ignored)."""
    value, _ = longest_chain(p, separator_vertices(p, u, v).elements)
    return int(round(value))


def linf_witness_chain(p: PocSet, u: Ultrafilter, v: Ultrafilter, weighted: bool = False) -> list[PocElement]:
    sep = separator_vertices(p, u, v).elements
    return longest_chain(p, sep, p.weights if weighted else None)[1]


def linf_distance_vertices(p: PocSet, u: Ultrafilter, v: Ultrafilter) -> float:
    """Weighted l-infinity distance between two vertices."""
    value, _ = longest_chain(p, separator_vertices(p, u, v).elements, p.weights)
    return float(value)


def median_vertices(p: PocSet, u: Ultrafilter, v: Ultrafilter, w: Ultrafilter) -> Ultrafilter:
    s = np.sign(np.array(u.sides) + np.array(v.sides) + np.array(w.sides))
    return Ultrafilter(tuple(int(x) for x in s))


def interval_contains(p: PocSet, u: Ultrafilter, v: Ultrafilter, probe: Ultrafilter) -> bool:
    """Whether ``probe`` lies on an l1 geodesic from ``u`` to ``v``.

    Tested combinatorially: every wall separating ``probe`` from ``u`` also
    separates ``v`` from ``u``.  This agrees with additivity of the weighted
    l1 distance whenever all weights are positive.
    """
    a, b, z = _bits_of(u), _bits_of(v), _bits_of(probe)
    return bool(np.all((a == z) | (a != b)))


def halfspace_vertices(p: PocSet, a) -> frozenset[Ultrafilter]:
    e = PocElement.from_code(_as_code(a))
    B = vertex_bits(p)
    rows = B[B[:, e.wall] == int(e.side < 0)]
    return frozenset(Ultrafilter.from_bits(r) for r in rows)


def vertex_index(p: PocSet, u: Ultrafilter) -> int:
    if "vertex_keys" not in p._cache:
        p._cache["vertex_keys"] = _keys(vertex_bits(p))
    keys = p._cache["vertex_keys"]
    k = _keys(_bits_of(u)[None, :])
    i = int(np.searchsorted(keys, k)[0])
    if i >= len(keys) or keys[i] != k[0]:
        raise KeyError(f"{u} is not a vertex of the dual")
    return i


def _convexity_violation(B: np.ndarray, members: np.ndarray):
    """First interval escape ``(x, y, z)`` for the vertex subset ``members``.

    ``B`` is the full vertex bit matrix and ``members`` a boolean mask over its
    rows.  ``z`` lies in ``I(x, y)`` iff every wall where ``z`` leaves ``x`` is
    also a wall where ``y`` leaves ``x``.
    """
    idx = np.nonzero(members)[0]
    outside = np.nonzero(~members)[0]
    if len(idx) < 2 or not len(outside):
        return None
    S = B[idx].astype(np.int8)
    Z = B[outside].astype(np.int8)
    leave_z = (Z[None, :, :] != S[:, None, :]).astype(np.float32)  # (k, mz, n)
    keep_y = (S[None, :, :] == S[:, None, :]).astype(np.float32)  # (k, k, n)
    M = leave_z @ np.swapaxes(keep_y, 1, 2)  # (k, mz, k): zero means z in I(x, y)
    hits = np.argwhere(M == 0)
    if not len(hits):
        return None
    x, z, y = hits[0]
    return int(idx[x]), int(idx[y]), int(outside[z])


def is_convex_vertexset(p: PocSet, s: Iterable[Ultrafilter]) -> bool:
    """Closed under l1 intervals, checked against every vertex of the dual."""
    B = vertex_bits(p)
    members = np.zeros(len(B), dtype=bool)
    for u in s:
        members[vertex_index(p, u)] = True
    return _convexity_violation(B, members) is None


# -- point metrics ---------------------------------------------------------------

def _as_points(p: PocSet, x, y) -> tuple[Point, Point]:
    if isinstance(x, Ultrafilter) and isinstance(y, Ultrafilter):
        return coordinates(p, x, x), coordinates(p, x, y)
    if isinstance(x, Ultrafilter):
        x = coordinates(p, y.basepoint, x)
    if isinstance(y, Ultrafilter):
        y = coordinates(p, x.basepoint, y)
    if x.basepoint != y.basepoint:
        raise ValueError("points are expressed relative to different basepoints")
    return x, y


def l1_distance_points(p: PocSet, x, y) -> float:
    x, y = _as_points(p, x, y)
    return float(np.abs(x.to_array() - y.to_array()).sum())


def separator(p: PocSet, x, y) -> Separator:
    """Elements ``a`` with ``a`` on the basepoint side and ``x(a) < y(a)``, or
    ``a*`` on the basepoint side and ``x(a) > y(a)``."""
    x, y = _as_points(p, x, y)
    xa, ya = x.to_array(), y.to_array()
    out = []
    for i, b in enumerate(x.basepoint.sides):
        if xa[i] < ya[i]:
            out.append(PocElement(i, b))
        elif xa[i] > ya[i]:
            out.append(PocElement(i, -b))
    return Separator(frozenset(out))


def linf_weighted_distance(p: PocSet, x, y) -> float:
    """Heaviest nested subset of the separator, node weight ``|x(a) - y(a)|``."""
    x, y = _as_points(p, x, y)
    diff = np.abs(x.to_array() - y.to_array())
    value, _ = longest_chain(p, separator(p, x, y).elements, diff)
    return float(value)


def median_points(p: PocSet, x: Point, y: Point, z: Point) -> Point:
    if not (x.basepoint == y.basepoint == z.basepoint):
        raise ValueError("points are expressed relative to different basepoints")
    m = np.median(np.stack([x.to_array(), y.to_array(), z.to_array()]), axis=0)
    out = Point.from_array(x.basepoint, m)
    check_point(p, out)
    return out


# -- normal cube paths and balls ------------------------------------------------------

def normal_cube_path(p: PocSet, u: Ultrafilter, v: Ultrafilter) -> BrokenPath:
    """Flip ``min(U_i \\ v)`` at each step until reaching ``v``.

    Lengths use the poc set's weights: a step across the transverse set ``A``
    costs ``max w(A)`` in l-infinity and ``sum w(A)`` in l1.
    """
    target = np.array(v.bits, dtype=np.uint8)
    cur = np.array(u.bits, dtype=np.uint8)
    S = p.strict
    verts = [u]
    steps = []
    l1 = linf = 0.0
    while np.any(cur != target):
        walls = np.nonzero(cur != target)[0]
        codes = 2 * walls + cur[walls]
        sub = S[np.ix_(codes, codes)]
        mins = codes[~sub.any(axis=0)]
        cur = cur.copy()
        cur[mins >> 1] ^= 1
        steps.append(frozenset(PocElement.from_code(c) for c in mins))
        verts.append(Ultrafilter.from_bits(cur))
        w = p.weights[mins >> 1]
        l1 += float(w.sum())
        linf += float(w.max())
    return BrokenPath(tuple(verts), tuple(steps), l1, linf)


def distance_matrix(p: PocSet, metric: str = "l1", vertices: Sequence[Ultrafilter] | None = None,
                    weighted: bool = True) -> np.ndarray:
    """Pairwise distances over the sorted vertex list (or ``vertices``).

    ``metric`` is ``"l1"`` or ``"linf"``; ``weighted=False`` uses unit weights.
    """
    if vertices is None:
        B = vertex_bits(p)
    else:
        B = np.array([v.bits for v in vertices], dtype=np.uint8).reshape(-1, p.n_walls)
    key = ("dmat", metric, weighted)
    cacheable = vertices is None
    if cacheable and key in p._cache:
        return p._cache[key]
    w = p.weights if weighted else np.ones(p.n_walls)
    m = len(B)
    if metric == "l1":
        D = ((B[:, None, :] != B[None, :, :]) * w).sum(axis=2).astype(float)
    elif metric == "linf":
        I, J = np.triu_indices(m, 1)
        vals = _pair_chain_values(p, B[I], B[J], w)
        D = np.zeros((m, m))
        D[I, J] = vals
        D[J, I] = vals
    else:
        raise ValueError(f"unknown metric {metric!r}")
    if cacheable:
        D.setflags(write=False)
        p._cache[key] = D
    return D


def unit_linf_matrix(p: PocSet) -> np.ndarray:
    return distance_matrix(p, "linf", weighted=False)


def linf_ball_vertices(p: PocSet, center: Ultrafilter, r: int) -> frozenset[Ultrafilter]:
    """Vertices within unit l-infinity distance ``r`` of ``center``."""
    D = unit_linf_matrix(p)
    row = D[vertex_index(p, center)]
    B = vertex_bits(p)
    return frozenset(Ultrafilter.from_bits(b) for b in B[row <= r + 1e-9])


def matrix_to_csv(D: np.ndarray, labels: Sequence[str]) -> str:
    buf = io.StringIO()
    buf.write("," + ",".join(labels) + "\n")
    for lab, row in zip(labels, D):
        buf.write(lab + "," + ",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x == int(x) else repr(x)
