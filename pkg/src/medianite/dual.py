"""Dual cubing of a finite poc set: ultrafilters, flips, cubes, coordinates.

Vertices are handled internally as rows of a ``uint8`` bit matrix, one
column per wall, where ``1`` means the negative side is chosen.  The public
:class:`Ultrafilter` stores the same choice as a sign vector of ``+1/-1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidPoint, NotMinimal, TooManyWalls
from .pocset import PocElement, PocSet, _as_code

DEFAULT_MAX_WALLS = 20


@dataclass(frozen=True)
class Ultrafilter:
    sides: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sides", tuple(int(s) for s in self.sides))
        if any(s not in (1, -1) for s in self.sides):
            raise ValueError("sides must be +1 or -1")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Ultrafilter":
        return cls(tuple(-1 if b else 1 for b in bits))

    @classmethod
    def from_string(cls, s: str) -> "Ultrafilter":
        return cls(tuple(1 if ch == "+" else -1 for ch in s if ch in "+-"))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(s < 0) for s in self.sides)

    @property
    def n_walls(self) -> int:
        return len(self.sides)

    def elements(self) -> tuple[PocElement, ...]:
        return tuple(PocElement(i, s) for i, s in enumerate(self.sides))

    def __contains__(self, e) -> bool:
        e = PocElement.from_code(_as_code(e))
        return self.sides[e.wall] == e.side

    def sort_key(self):
        return self.bits

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.sides)


@dataclass(frozen=True)
class Point:
    """A point of the weighted realization, relative to a basepoint vertex.

    ``coords`` lists ``(wall, value)`` for nonzero coordinates only; the value
    is the distance travelled across that wall away from the basepoint side.
    """

    basepoint: Ultrafilter
    coords: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        clean = tuple(sorted((int(w), float(v)) for w, v in self.coords if v != 0))
        object.__setattr__(self, "coords", clean)

    @classmethod
    def from_array(cls, basepoint: Ultrafilter, values) -> "Point":
        values = np.asarray(values, dtype=float)
        return cls(basepoint, tuple((i, float(v)) for i, v in enumerate(values) if v != 0))

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.basepoint.n_walls)
        for w, v in self.coords:
            out[w] = v
        return out

    def __getitem__(self, wall: int) -> float:
        return dict(self.coords).get(int(wall), 0.0)


@dataclass(frozen=True)
class CubeFace:
    base: Ultrafilter
    spanned_walls: tuple[PocElement, ...]

    @property
    def dim(self) -> int:
        return len(self.spanned_walls)

    def corners(self, p: PocSet) -> list[Ultrafilter]:
        """All ``2**dim`` corners, obtained by flipping every subset of the span."""
        out = []
        k = self.dim
        for mask in range(1 << k):
            u = self.base
            for i in range(k):
                if mask >> i & 1:
                    u = _flip_unchecked(u, self.spanned_walls[i])
            out.append(u)
        return out


# -- bit-matrix helpers ------------------------------------------------------

def _bits_of(u) -> np.ndarray:
    if isinstance(u, Ultrafilter):
        return np.array(u.bits, dtype=np.uint8)
    arr = np.asarray(u)
    if not np.all(np.isin(arr, (1, -1))):
        raise ValueError("expected a sign vector of +1/-1 entries")
    return (arr < 0).astype(np.uint8)


def _keys(B: np.ndarray) -> np.ndarray:
    packed = np.ascontiguousarray(np.packbits(B, axis=1))
    return packed.view(np.dtype((np.void, packed.shape[1]))).ravel()


def _chosen(B: np.ndarray) -> np.ndarray:
    F, n = B.shape
    C = np.empty((F, 2 * n), dtype=bool)
    C[:, 0::2] = B == 0
    C[:, 1::2] = B == 1
    return C


def _minimal(p: PocSet, B: np.ndarray) -> np.ndarray:
    """``(F, 2n)`` mask of chosen elements with no chosen strict predecessor."""
    C = _chosen(B)
    below = (C.astype(np.float32) @ p.strict.astype(np.float32)) > 0
    return C & ~below


def _coherent_rows(p: PocSet, B: np.ndarray) -> np.ndarray:
    """Vectorized coherence test for a ``(F, n)`` bit matrix."""
    n = p.n_walls
    ok = np.ones(B.shape[0], dtype=bool)
    L = p.leq
    for i in range(n):
        for j in range(i + 1, n):
            for si in (0, 1):
                for sj in (0, 1):
                    # chosen a = (i, si), b = (j, sj); forbidden when a <= b*
                    if L[2 * i + si, (2 * j + sj) ^ 1]:
                        ok &= ~((B[:, i] == si) & (B[:, j] == sj))
    return ok


def is_coherent(p: PocSet, sides) -> bool:
    b = _bits_of(sides)
    if b.shape != (p.n_walls,):
        raise ValueError("sign vector length does not match the number of walls")
    codes = 2 * np.arange(p.n_walls) + b
    return not p.leq[np.ix_(codes, codes ^ 1)].any()


def seed_ultrafilter(p: PocSet, prefer: Sequence[int] | None = None) -> Ultrafilter:
    """Greedy coherent selection.

    Walls are decided in index order.  The preferred side (positive unless
    ``prefer`` says otherwise) is taken when its complement has not already
    been forced, and each choice is closed upward.
    """
    n = p.n_walls
    chosen = np.zeros(2 * n, dtype=bool)
    for i in range(n):
        if chosen[2 * i] or chosen[2 * i + 1]:
            continue
        want = 2 * i + (1 if prefer is not None and prefer[i] < 0 else 0)
        code = want if not chosen[want ^ 1] else want ^ 1
        chosen |= p.leq[code]
    bits = chosen[1::2].astype(np.uint8)
    return Ultrafilter.from_bits(bits)


def _bfs_bits(p: PocSet, seed: np.ndarray) -> np.ndarray:
    """All ultrafilters reachable from ``seed`` by flips, sorted."""
    frontier = seed.reshape(1, -1).astype(np.uint8)
    blocks = [frontier]
    seen = _keys(frontier)
    while frontier.shape[0]:
        M = _minimal(p, frontier)
        rows, codes = np.nonzero(M)
        nb = frontier[rows].copy()
        nb[np.arange(len(rows)), codes >> 1] ^= 1
        if not len(nb):
            break
        k = _keys(nb)
        _, first = np.unique(k, return_index=True)
        nb, k = nb[first], k[first]
        fresh = ~np.isin(k, seen)
        frontier = nb[fresh]
        if frontier.shape[0]:
            blocks.append(frontier)
            seen = np.concatenate([seen, k[fresh]])
    allb = np.concatenate(blocks)
    order = np.argsort(_keys(allb), kind="stable")
    return allb[order]


def _exhaustive_bits(p: PocSet) -> np.ndarray:
    n = p.n_walls
    idx = np.arange(1 << n, dtype=np.int64)
    B = ((idx[:, None] >> (n - 1 - np.arange(n))) & 1).astype(np.uint8)
    return B[_coherent_rows(p, B)]


def vertex_bits(p: PocSet, mode: str = "auto", max_walls: int = DEFAULT_MAX_WALLS, seed=None) -> np.ndarray:
    """Sorted ``(m, n)`` bit matrix of all ultrafilters (cached per poc set)."""
    if mode == "auto":
        if seed is None:
            for m in ("exhaustive", "bfs"):
                if ("vertex_bits", m) in p._cache:
                    return p._cache[("vertex_bits", m)]
        mode = "exhaustive" if p.n_walls <= max_walls and seed is None else "bfs"
    key = ("vertex_bits", mode)
    if seed is None and key in p._cache:
        return p._cache[key]
    if mode == "exhaustive":
        if p.n_walls > max_walls:
            raise TooManyWalls(f"{p.n_walls} walls exceeds the exhaustive cap of {max_walls}")
        B = _exhaustive_bits(p)
    elif mode == "bfs":
        s = seed_ultrafilter(p) if seed is None else seed
        if not is_coherent(p, s):
            raise ValueError("BFS seed is not an ultrafilter")
        B = _bfs_bits(p, _bits_of(s))
    else:
        raise ValueError(f"unknown enumeration mode {mode!r}")
    B.setflags(write=False)
    if seed is None:
        p._cache[key] = B
    return B


def enumerate_ultrafilters(p: PocSet, mode: str = "auto", max_walls: int = DEFAULT_MAX_WALLS, seed=None) -> list[Ultrafilter]:
    """All ultrafilters in sorted sign-vector order (all-positive first).

    ``mode="exhaustive"`` filters all ``2**n`` selections and refuses more
    than ``max_walls`` walls; ``mode="bfs"`` flips outward from ``seed`` (or a
    greedy seed).  ``"auto"`` picks exhaustive when allowed.
    """
    return [Ultrafilter.from_bits(r) for r in vertex_bits(p, mode, max_walls, seed)]


def min_elements(p: PocSet, u: Ultrafilter) -> frozenset[PocElement]:
    M = _minimal(p, _bits_of(u)[None, :])[0]
    return frozenset(PocElement.from_code(c) for c in np.nonzero(M)[0])


def _flip_unchecked(u: Ultrafilter, a: PocElement) -> Ultrafilter:
    sides = list(u.sides)
    sides[a.wall] = -sides[a.wall]
    return Ultrafilter(tuple(sides))


def flip(p: PocSet, u: Ultrafilter, a) -> Ultrafilter:
    """Replace the minimal element ``a`` of ``u`` by its complement."""
    a = PocElement.from_code(_as_code(a))
    if a not in min_elements(p, u):
        raise NotMinimal(f"{p.element_name(a)} is not a minimal element of {u}")
    return _flip_unchecked(u, a)


def flip_set(p: PocSet, u: Ultrafilter, elements: Iterable) -> Ultrafilter:
    """Flip a transverse subset of ``min(u)`` (order of flips is irrelevant)."""
    for a in sorted((PocElement.from_code(_as_code(e)) for e in elements), key=lambda e: e.code):
        u = flip(p, u, a)
    return u


def cubes_at_vertex(p: PocSet, u: Ultrafilter, max_dim: int | None = None) -> list[CubeFace]:
    mins = sorted(min_elements(p, u), key=lambda e: e.code)
    N = p.nested_matrix
    cap = len(mins) if max_dim is None else max_dim
    faces = []

    def grow(start, chosen):
        faces.append(CubeFace(u, tuple(chosen)))
        if len(chosen) == cap:
            return
        for i in range(start, len(mins)):
            e = mins[i]
            if all(not N[e.code, c.code] for c in chosen):
                grow(i + 1, chosen + [e])

    grow(0, [])
    return faces


@dataclass(frozen=True)
class CubingGraph:
    vertices: tuple[Ultrafilter, ...]
    edges: tuple[tuple[int, int, int], ...]
    basepoint: int = 0
    pocset: PocSet | None = field(default=None, compare=False)
    wall_names: tuple[str, ...] = ()

    def index(self, u: Ultrafilter) -> int:
        lookup = self.__dict__.get("_lookup")
        if lookup is None:
            lookup = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_lookup", lookup)
        return lookup[u]

    def degree(self, i: int) -> int:
        return sum(1 for a, b, _ in self.edges if i in (a, b))

    def to_json(self) -> dict:
        names = self.wall_names or tuple(f"w{i}" for i in range(len(self.vertices[0].sides)))
        return {
            "walls": list(names),
            "basepoint": self.basepoint,
            "vertices": [str(v) for v in self.vertices],
            "edges": [[i, j, names[w]] for i, j, w in self.edges],
        }

    def to_dot(self) -> str:
        names = self.wall_names or tuple(f"w{i}" for i in range(len(self.vertices[0].sides)))
        lines = ["graph cubing {"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  {i} [label="{v}"];')
        for i, j, w in self.edges:
            lines.append(f'  {i} -- {j} [label="{names[w]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, doc, pocset: PocSet | None = None) -> "CubingGraph":
        if isinstance(doc, str):
            doc = json.loads(doc)
        names = tuple(doc["walls"])
        pos = {s: i for i, s in enumerate(names)}
        verts = tuple(Ultrafilter.from_string(s) for s in doc["vertices"])
        edges = tuple((int(i), int(j), pos[w]) for i, j, w in doc["edges"])
        return cls(verts, edges, int(doc.get("basepoint", 0)), pocset, names)


def build_cubing(p: PocSet, basepoint: Ultrafilter | None = None, **enum_kwargs) -> CubingGraph:
    """Vertices and flip edges of the dual cubing."""
    B = vertex_bits(p, **enum_kwargs)
    verts = tuple(Ultrafilter.from_bits(r) for r in B)
    keys = _keys(B)
    edges = []
    for w in range(p.n_walls):
        F = B.copy()
        F[:, w] ^= 1
        pos = np.searchsorted(keys, _keys(F))
        pos = np.minimum(pos, len(keys) - 1)
        hit = keys[pos] == _keys(F)
        for i in np.nonzero(hit)[0]:
            j = int(pos[i])
            if i < j:
                edges.append((int(i), j, w))
    edges.sort()
    bp = 0 if basepoint is None else verts.index(basepoint)
    return CubingGraph(verts, tuple(edges), bp, p, p.labels)


def coordinates(p: PocSet, basepoint: Ultrafilter, u: Ultrafilter) -> Point:
    """Weighted coordinates of a vertex: ``w(wall)`` where ``u`` leaves the basepoint side."""
    vals = [(i, p.weight(i)) for i, (s, b) in enumerate(zip(u.sides, basepoint.sides)) if s != b]
    return Point(basepoint, tuple(vals))


def point_vertex(p: PocSet, x: Point, tol: float = 1e-12) -> Ultrafilter | None:
    """The vertex at ``x`` if every coordinate is an endpoint, else ``None``."""
    sides = list(x.basepoint.sides)
    for w, v in x.coords:
        if abs(v - p.weights[w]) <= tol:
            sides[w] = -sides[w]
        elif abs(v) > tol:
            return None
    return Ultrafilter(tuple(sides))


def check_point(p: PocSet, x: Point, tol: float = 1e-12) -> None:
    """Raise :class:`InvalidPoint` unless ``x`` lies in the weighted dual.

    Coordinates must sit in ``[0, w]``; the fractional walls must be pairwise
    transverse and every cube corner obtained by rounding them must be
    coherent.  Coherence is pairwise, so checking walls two at a time suffices.
    """
    if x.basepoint.n_walls != p.n_walls:
        raise InvalidPoint("basepoint has the wrong number of walls")
    if not is_coherent(p, x.basepoint):
        raise InvalidPoint("basepoint is not an ultrafilter")
    vals = x.to_array()
    w = p.weights
    if np.any(vals < -tol) or np.any(vals > w + tol):
        raise InvalidPoint("coordinate outside [0, w(wall)]")
    frac = (vals > tol) & (vals < w - tol)
    far = vals >= w - tol
    base_bits = np.array(x.basepoint.bits, dtype=np.uint8)
    fixed_bits = base_bits ^ far.astype(np.uint8)
    L = p.leq
    n = p.n_walls
    for i in range(n):
        opts_i = (0, 1) if frac[i] else (int(fixed_bits[i]),)
        for j in range(i + 1, n):
            opts_j = (0, 1) if frac[j] else (int(fixed_bits[j]),)
            for si in opts_i:
                for sj in opts_j:
                    if L[2 * i + si, (2 * j + sj) ^ 1]:
                        raise InvalidPoint(f"point leaves the complex near walls {p.labels[i]}, {p.labels[j]}")
