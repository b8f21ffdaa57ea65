"""Refinements, lower rational approximations and weight deformations."""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dual import Ultrafilter, enumerate_ultrafilters, vertex_bits
from .errors import DegenerateWall, WeightMismatch
from .metrics import distance_matrix, longest_chain, normal_cube_path
from .pocset import PocElement, PocSet, build_from_generators, reduce_degenerate
from .reports import FAIL, PASS, Report

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class RefinementMap:
    """Poc morphism ``source -> target`` whose fibers are chains.

    ``fiber[p]`` lists the source walls over target wall ``p`` from the bottom
    of the chain up: the positive sides satisfy ``p1 < p2 < ...``.
    """

    source: PocSet
    target: PocSet
    fiber: tuple[tuple[int, ...], ...]
    check_weights: bool = True

    def __post_init__(self):
        object.__setattr__(self, "fiber", tuple(tuple(int(x) for x in f) for f in self.fiber))
        if len(self.fiber) != self.target.n_walls:
            raise ValueError("one fiber per target wall required")
        flat = sorted(x for f in self.fiber for x in f)
        if flat != list(range(self.source.n_walls)):
            raise ValueError("fibers must partition the source walls")
        S = self.source.strict
        for f in self.fiber:
            if not f:
                raise ValueError("empty fiber")
            for a, b in zip(f, f[1:]):
                if not S[2 * a, 2 * b]:
                    raise ValueError(f"fiber {f} is not a chain in the stated order")
        fc = self.element_map
        src_wall = np.arange(self.source.n_elements) >> 1
        parent = self.parent[src_wall]
        cross = parent[:, None] != parent[None, :]
        St = self.target.strict[np.ix_(fc, fc)]
        if np.any((S != St) & cross):
            a, b = np.argwhere((S != St) & cross)[0]
            raise ValueError(f"cross-fiber order mismatch at source elements {a}, {b}")
        if self.check_weights:
            sums = np.array([self.source.weights[list(f)].sum() for f in self.fiber])
            if np.any(np.abs(sums - self.target.weights) > WEIGHT_TOL):
                raise WeightMismatch("fiber weights do not add up to the target weights")

    @property
    def parent(self) -> np.ndarray:
        out = np.empty(self.source.n_walls, dtype=int)
        for p, f in enumerate(self.fiber):
            out[list(f)] = p
        return out

    @property
    def element_map(self) -> np.ndarray:
        """Target element code for each source element code."""
        codes = np.arange(self.source.n_elements)
        return 2 * self.parent[codes >> 1] + (codes & 1)

    def image(self, e) -> PocElement:
        e = e if isinstance(e, PocElement) else PocElement.from_code(e)
        return PocElement(int(self.parent[e.wall]), e.side)


def refine(p: PocSet, splits: Mapping | None = None) -> RefinementMap:
    """Split walls into chains of sub-walls with the given sub-weights.

    ``splits`` maps wall index or label to a list of positive sub-weights
    summing to the wall's weight; unlisted walls are kept whole.
    """
    splits = dict(splits or {})
    parts: list[list[float]] = []
    for i, name in enumerate(p.labels):
        s = splits.get(i, splits.get(name))
        if s is None:
            s = [float(p.weights[i])]
        s = [float(x) for x in s]
        if not s or any(x <= 0 for x in s):
            raise ValueError(f"sub-weights for wall {name} must be positive")
        if abs(sum(s) - p.weights[i]) > WEIGHT_TOL:
            raise WeightMismatch(f"sub-weights of {name} sum to {sum(s)}, expected {p.weights[i]}")
        parts.append(s)

    fiber, labels, weights = [], [], []
    for i, s in enumerate(parts):
        start = len(labels)
        fiber.append(tuple(range(start, start + len(s))))
        if len(s) == 1:
            labels.append(p.labels[i])
        else:
            labels += [f"{p.labels[i]}.{k + 1}" for k in range(len(s))]
        weights += s

    rels = []
    for f in fiber:
        rels += [(PocElement(a), PocElement(b)) for a, b in zip(f, f[1:])]
    for x, y in p.relations():
        if x.wall == y.wall:
            continue
        for a in fiber[x.wall]:
            for b in fiber[y.wall]:
                rels.append((PocElement(a, x.side), PocElement(b, y.side)))
    src = build_from_generators(len(labels), rels, weights, labels)
    return RefinementMap(src, p, tuple(fiber))


def compose(outer: RefinementMap, inner: RefinementMap) -> RefinementMap:
    """``inner: P2 -> P1`` followed by ``outer: P1 -> P``."""
    if inner.target != outer.source:
        raise ValueError("refinement maps do not compose")
    fiber = tuple(tuple(x for j in f for x in inner.fiber[j]) for f in outer.fiber)
    return RefinementMap(inner.source, outer.target, fiber)


def pull_back_vertex(r: RefinementMap, u: Ultrafilter) -> Ultrafilter:
    return Ultrafilter(tuple(u.sides[int(k)] for k in r.parent))


def lower_rational_approximation(p: PocSet, n: int):
    """Replace each wall of weight ``w`` by ``floor(n * w)`` unit sub-walls.

    Returns ``(unit poc set, 1 / n, refinement map)``; the map's target is
    ``p`` carrying the integer weights ``floor(n * w)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    counts = _floor_counts(p, n)
    if np.any(counts == 0):
        bad = [p.labels[i] for i in np.nonzero(counts == 0)[0]]
        raise DegenerateWall(f"walls {bad} vanish at n={n}")
    target = p.with_weights(counts.astype(float))
    r = refine(target, {i: [1.0] * int(c) for i, c in enumerate(counts)})
    return r.source, 1.0 / n, r


def _floor_counts(p: PocSet, n: int) -> np.ndarray:
    # tolerance absorbs products such as 0.29 * 100 = 28.999999999999996
    return np.array([math.floor(n * w + WEIGHT_TOL) for w in p.weights], dtype=int)


def deformation_bound_check(p: PocSet, u_weights, w_weights) -> Report:
    """Largest change of vertex distances between two weightings, against ``||u - w||_1``.

    Distances are computed in floating point; every pair whose deviation comes
    within ``1e-9`` of the bound is recomputed in exact rational arithmetic, so
    the verdict is an exact inequality.
    """
    pu, pw = p.with_weights(u_weights), p.with_weights(w_weights)
    bound = float(np.abs(pu.weights - pw.weights).sum())
    B = vertex_bits(p)
    dev = {m: np.abs(distance_matrix(pu, m) - distance_matrix(pw, m)) for m in ("l1", "linf")}
    per = {m: float(d.max()) if d.size else 0.0 for m, d in dev.items()}
    both = np.maximum(dev["l1"], dev["linf"])
    i, j = np.unravel_index(np.argmax(both), both.shape)
    best, witness = float(both[i, j]), [_sign(B[i]), _sign(B[j])]
    ok = True
    close = np.argwhere(both > bound - 1e-9)
    if len(close):
        fu = [Fraction(float(x)) for x in pu.weights]
        fw = [Fraction(float(x)) for x in pw.weights]
        exact_bound = sum(abs(a - b) for a, b in zip(fu, fw))
        for a, b in close:
            d = _exact_deviation(p, B[a], B[b], fu, fw)
            if d > exact_bound:
                ok = False
                best, witness = float(d), [_sign(B[a]), _sign(B[b])]
                break
    return Report("deform", PASS if ok else FAIL, bound, witness,
                  {"max_deviation": best, "max_deviation_l1": per["l1"], "max_deviation_linf": per["linf"]})


def _exact_deviation(p: PocSet, x, y, fu, fw) -> Fraction:
    walls = np.nonzero(x != y)[0]
    sep = [PocElement(int(k), -1 if x[k] else 1) for k in walls]
    l1 = abs(sum(fu[k] for k in walls) - sum(fw[k] for k in walls))
    linf = abs(longest_chain(p, sep, fu)[0] - longest_chain(p, sep, fw)[0])
    return max(Fraction(l1), Fraction(linf))


def subdivision_isometry_check(r: RefinementMap, tol: float = WEIGHT_TOL) -> Report:
    """Vertex distances of the target against those of the pulled-back vertices."""
    verts = enumerate_ultrafilters(r.target)
    pulled = [pull_back_vertex(r, u) for u in verts]
    best, witness, per = 0.0, None, {}
    for metric in ("l1", "linf"):
        dt = distance_matrix(r.target, metric)
        ds = distance_matrix(r.source, metric, vertices=pulled)
        dev = np.abs(dt - ds)
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        per[metric] = float(dev[i, j])
        if dev[i, j] > best:
            best, witness = float(dev[i, j]), [str(verts[i]), str(verts[j])]
    status = PASS if best <= tol else FAIL
    return Report("subdivide", status, tol, witness,
                  {"max_deviation": best, "max_deviation_l1": per["l1"], "max_deviation_linf": per["linf"]})


def normal_path_excess(p: PocSet) -> tuple[float, list[str] | None]:
    """Largest gap between normal-cube-path length and l-infinity distance."""
    verts = enumerate_ultrafilters(p)
    D = distance_matrix(p, "linf")
    best, witness = 0.0, None
    for i, u in enumerate(verts):
        for j, v in enumerate(verts):
            gap = normal_cube_path(p, u, v).length_linf - D[i, j]
            if gap > best + WEIGHT_TOL:
                best, witness = gap, [str(u), str(v)]
    return best, witness


def approximation_check(p: PocSet, ns: Sequence[int] = (1, 2, 4, 8, 16)) -> Report:
    """Rescaled distances of lower rational approximations against the weighted dual.

    Walls that vanish at a given ``n`` are dropped first (a zero-thickness wall
    does not change the semi-metric).  The bound at ``n`` is ``n_walls / n``.
    """
    verts = enumerate_ultrafilters(p)
    B = vertex_bits(p)
    exact = {m: distance_matrix(p, m) for m in ("l1", "linf")}
    rows, ok = [], True
    worst_witness = None
    for n in ns:
        counts = _floor_counts(p, n)
        reduced, keep = reduce_degenerate(p.with_weights(counts.astype(float)))
        kept = sorted(keep)
        tag = {"n": int(n), "bound": p.n_walls / n, "dropped": [p.labels[i] for i in range(p.n_walls) if i not in keep]}
        if reduced.n_walls:
            _, _, r = lower_rational_approximation(reduced, 1)
            pulled = [pull_back_vertex(r, Ultrafilter(tuple(u.sides[k] for k in kept))) for u in verts]
        dev_all = 0.0
        for m in ("l1", "linf"):
            if reduced.n_walls:
                approx = distance_matrix(r.source, m, vertices=pulled) / n
            else:
                approx = np.zeros_like(exact[m])
            dev = np.abs(approx - exact[m])
            i, j = np.unravel_index(np.argmax(dev), dev.shape)
            tag[f"max_deviation_{m}"] = float(dev[i, j])
            if dev[i, j] > dev_all:
                dev_all = float(dev[i, j])
                if dev_all > tag["bound"] + WEIGHT_TOL:
                    worst_witness = [_sign(B[i]), _sign(B[j])]
        tag["max_deviation"] = dev_all
        tag["pass"] = dev_all <= tag["bound"] + WEIGHT_TOL
        ok &= tag["pass"]
        rows.append(tag)
    return Report("approx", PASS if ok else FAIL, [t["bound"] for t in rows], worst_witness, {"sweep": rows})


def _sign(bits) -> str:
    return "".join("-" if b else "+" for b in bits)
