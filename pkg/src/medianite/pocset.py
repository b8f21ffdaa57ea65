"""Finite poc sets with weights.

A poc set on ``n`` walls has ``2n`` proper elements.  Element codes are
``2 * wall + bit`` where ``bit == 0`` is the positive side and ``bit == 1``
its complement, so the involution is ``code ^ 1``.  The trivial elements
``0`` and ``0*`` are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AxiomViolation, MissingWeight, NotATree, SameWall


@dataclass(frozen=True)
class PocElement:
    wall: int
    side: int = 1  # +1 or -1

    def __post_init__(self):
        if self.side not in (1, -1):
            raise ValueError(f"side must be +1 or -1, got {self.side!r}")

    @property
    def code(self) -> int:
        return 2 * self.wall + (self.side < 0)

    @property
    def star(self) -> "PocElement":
        return PocElement(self.wall, -self.side)

    @classmethod
    def from_code(cls, code: int) -> "PocElement":
        return cls(int(code) >> 1, -1 if code & 1 else 1)

    def __repr__(self):
        return f"{self.wall}{'+' if self.side > 0 else '-'}"


def _as_code(e) -> int:
    if isinstance(e, PocElement):
        return e.code
    return int(e)


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    rel = rel.copy()
    for k in range(rel.shape[0]):
        rel |= rel[:, k : k + 1] & rel[k : k + 1, :]
    return rel


class PocSet:
    """Immutable finite poc set with a weight on its walls.

    ``leq`` is the closed order over the ``2n`` proper elements.  All axioms
    are validated on construction.
    """

    def __init__(self, n_walls: int, leq, weights=None, labels: Sequence[str] | None = None):
        n = int(n_walls)
        leq = np.array(leq, dtype=bool, copy=True).reshape(2 * n, 2 * n)
        np.fill_diagonal(leq, True)
        if weights is None:
            weights = np.ones(n)
        weights = np.asarray(weights, dtype=float).reshape(n)
        if labels is None:
            labels = [f"w{i}" for i in range(n)]
        labels = tuple(str(s) for s in labels)
        if len(labels) != n or len(set(labels)) != n:
            raise ValueError("labels must be distinct, one per wall")
        for s in labels:
            if s.endswith("*") or not s:
                raise ValueError(f"invalid wall label {s!r}")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be finite and nonnegative")

        _validate(leq)
        leq.setflags(write=False)
        weights.setflags(write=False)
        self.n_walls = n
        self.leq = leq
        self.weights = weights
        self.labels = labels
        self._cache: dict = {}

    # -- basic queries -------------------------------------------------
    @property
    def n_elements(self) -> int:
        return 2 * self.n_walls

    def le(self, a, b) -> bool:
        return bool(self.leq[_as_code(a), _as_code(b)])

    def lt(self, a, b) -> bool:
        a, b = _as_code(a), _as_code(b)
        return a != b and bool(self.leq[a, b])

    @property
    def strict(self) -> np.ndarray:
        """Strict order ``a < b`` as a boolean matrix."""
        if "strict" not in self._cache:
            s = self.leq.copy()
            np.fill_diagonal(s, False)
            s.setflags(write=False)
            self._cache["strict"] = s
        return self._cache["strict"]

    @property
    def nested_matrix(self) -> np.ndarray:
        """``N[a, b]`` true iff elements ``a`` and ``b`` are nested.

        Pairs on a common wall count as nested.
        """
        if "nested" not in self._cache:
            L = self.leq
            idx = np.arange(self.n_elements) ^ 1
            N = L | L[idx, :] | L[:, idx] | L[np.ix_(idx, idx)]
            walls = np.arange(self.n_elements) >> 1
            N |= walls[:, None] == walls[None, :]
            N.setflags(write=False)
            self._cache["nested"] = N
        return self._cache["nested"]

    @property
    def wall_nested(self) -> np.ndarray:
        """Wall-level nesting (``n x n``), diagonal true."""
        if "wall_nested" not in self._cache:
            W = self.nested_matrix[::2, ::2].copy()
            W.setflags(write=False)
            self._cache["wall_nested"] = W
        return self._cache["wall_nested"]

    def is_unit(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def weight(self, wall_or_element) -> float:
        if isinstance(wall_or_element, PocElement):
            return float(self.weights[wall_or_element.wall])
        return float(self.weights[int(wall_or_element)])

    def with_weights(self, weights) -> "PocSet":
        if isinstance(weights, Mapping):
            weights = _weights_from_mapping(weights, self.labels, required=True)
        return PocSet(self.n_walls, self.leq, weights, self.labels)

    def with_labels(self, labels) -> "PocSet":
        return PocSet(self.n_walls, self.leq, self.weights, labels)

    # -- names ---------------------------------------------------------
    def element_name(self, e) -> str:
        e = PocElement.from_code(_as_code(e))
        return self.labels[e.wall] + ("" if e.side > 0 else "*")

    def element(self, name: str) -> PocElement:
        star = name.endswith("*")
        base = name[:-1] if star else name
        try:
            wall = self.labels.index(base)
        except ValueError:
            raise KeyError(f"unknown wall {base!r}") from None
        return PocElement(wall, -1 if star else 1)

    def relations(self) -> list[tuple[PocElement, PocElement]]:
        """All strict relations ``a < b`` between proper elements."""
        rows, cols = np.nonzero(self.strict)
        return [(PocElement.from_code(a), PocElement.from_code(b)) for a, b in zip(rows, cols)]

    def cover_relations(self) -> list[tuple[PocElement, PocElement]]:
        """Hasse diagram of the order (strict relations with nothing between)."""
        S = self.strict
        between = (S.astype(np.int32) @ S.astype(np.int32)) > 0
        rows, cols = np.nonzero(S & ~between)
        return [(PocElement.from_code(a), PocElement.from_code(b)) for a, b in zip(rows, cols)]

    # -- dunder --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PocSet):
            return NotImplemented
        return (
            self.n_walls == other.n_walls
            and self.labels == other.labels
            and np.array_equal(self.leq, other.leq)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.n_walls, self.labels, self.leq.tobytes(), self.weights.tobytes()))

    def __repr__(self):
        return f"PocSet(n_walls={self.n_walls}, relations={len(self.cover_relations())})"


def _validate(leq: np.ndarray) -> None:
    N = leq.shape[0]
    codes = np.arange(N)
    comp = codes ^ 1
    # involution must reverse the order
    if not np.array_equal(leq, leq[np.ix_(comp, comp)].T):
        raise ValueError("order is not reversed by the involution")
    if not np.array_equal(leq, transitive_closure(leq)):
        raise ValueError("order relation is not transitively closed")
    dag = leq[codes, comp]
    if dag.any():
        a = int(np.argmax(dag))
        raise AxiomViolation("dagger", (PocElement.from_code(a), PocElement.from_code(a ^ 1)))
    sym = leq & leq.T
    np.fill_diagonal(sym, False)
    if sym.any():
        a, b = np.argwhere(sym)[0]
        raise AxiomViolation("antisymmetry", (PocElement.from_code(a), PocElement.from_code(b)))
    # at most one nesting relation per proper pair; implied by the two checks
    # above but kept as a guard
    L = leq.astype(np.int8)
    count = L + L[comp, :] + L[:, comp] + L[np.ix_(comp, comp)]
    walls = codes >> 1
    count[walls[:, None] == walls[None, :]] = 0
    if (count > 1).any():
        a, b = np.argwhere(count > 1)[0]
        raise AxiomViolation("degenerate-pair", (PocElement.from_code(a), PocElement.from_code(b)))


def _weights_from_mapping(weights: Mapping, labels: Sequence[str], required: bool) -> np.ndarray:
    out = np.ones(len(labels))
    missing = []
    for i, name in enumerate(labels):
        for key in (i, name):
            if key in weights:
                out[i] = float(weights[key])
                break
        else:
            missing.append(name)
    if missing and required:
        raise MissingWeight(f"no weight given for walls {missing}")
    return out


# -- constructors -----------------------------------------------------------

def build_from_generators(
    n_walls: int,
    generator_relations: Iterable[tuple] = (),
    weights: Mapping | Sequence[float] | None = None,
    labels: Sequence[str] | None = None,
) -> PocSet:
    """Close declared relations ``a <= b`` into a poc set.

    Each relation also contributes its mirror ``b* <= a*``.  ``weights`` may
    be a sequence, a mapping keyed by wall index or label, or ``None`` for
    unit weights; a partial mapping raises :class:`MissingWeight`.
    """
    n = int(n_walls)
    rel = np.eye(2 * n, dtype=bool)
    for a, b in generator_relations:
        a, b = _as_code(a), _as_code(b)
        if not (0 <= a < 2 * n and 0 <= b < 2 * n):
            raise ValueError(f"relation ({a}, {b}) references an unknown element")
        rel[a, b] = True
        rel[b ^ 1, a ^ 1] = True
    rel = transitive_closure(rel)
    if labels is None:
        labels = [f"w{i}" for i in range(n)]
    if isinstance(weights, Mapping):
        weights = _weights_from_mapping(weights, labels, required=True)
    return PocSet(n, rel, weights, labels)


def pocset_from_halfspaces(ground: Sequence, halfspaces: Sequence[Iterable], labels=None, weights=None) -> PocSet:
    """Sub poc set of the power set of ``ground`` spanned by ``halfspaces``.

    The order is inclusion; each halfspace is the positive side of its wall.
    """
    ground = list(ground)
    full = frozenset(ground)
    sets = []
    for h in halfspaces:
        h = frozenset(h)
        if not h or h == full or not h <= full:
            raise ValueError(f"halfspace {set(h)} is trivial or not inside the ground set")
        sets += [h, full - h]
    walls = {}
    for i in range(0, len(sets), 2):
        key = min(sets[i], sets[i + 1], key=lambda s: sorted(map(repr, s)))
        if key in walls:
            raise AxiomViolation("degenerate-pair", (PocElement(walls[key]), PocElement(i // 2)),
                                 "two walls define the same halfspace pair")
        walls[key] = i // 2
    N = len(sets)
    leq = np.array([[sets[a] <= sets[b] for b in range(N)] for a in range(N)], dtype=bool)
    if labels is None:
        labels = [f"w{i}" for i in range(N // 2)]
    if isinstance(weights, Mapping):
        weights = _weights_from_mapping(weights, labels, required=True)
    return PocSet(N // 2, leq, weights, labels)


def transverse_pocset(n: int, weights=None) -> PocSet:
    return build_from_generators(n, [], weights, labels=[f"b{i+1}" for i in range(n)])


def linear_pocset(k: int, weights=None, prefix: str = "a") -> PocSet:
    """``k`` walls with positive sides ``a1 < a2 < ... < ak``."""
    rels = [(PocElement(i), PocElement(i + 1)) for i in range(k - 1)]
    return build_from_generators(k, rels, weights, labels=[f"{prefix}{i+1}" for i in range(k)])


def tree_pocset(tree_edges: Sequence[tuple], weights=None) -> PocSet:
    """Poc set of edge cuts of a finite tree.

    The positive side of the wall of edge ``(u, v)`` is the component of
    ``T - e`` containing ``u``.
    """
    edges = [tuple(e) for e in tree_edges]
    nodes = sorted({x for e in edges for x in e}, key=repr)
    if not edges:
        raise NotATree("a tree with no edges has no walls")
    if len(set(frozenset(e) for e in edges)) != len(edges) or any(u == v for u, v in edges):
        raise NotATree("repeated edge or loop")
    if len(edges) != len(nodes) - 1:
        raise NotATree(f"{len(nodes)} nodes but {len(edges)} edges")
    adj = {x: set() for x in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)

    def component(start, cut):
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if {x, y} == cut or y in seen:
                    continue
                seen.add(y)
                stack.append(y)
        return seen

    if len(component(nodes[0], set())) != len(nodes):
        raise NotATree("graph is disconnected")
    halves = [component(u, {u, v}) for u, v in edges]
    labels = [f"{u}-{v}" for u, v in edges]
    return pocset_from_halfspaces(nodes, halves, labels=labels, weights=weights)


def wedge_sum(p: PocSet, q: PocSet) -> PocSet:
    """Disjoint union of walls with no relations across the two parts."""
    n, m = p.n_walls, q.n_walls
    leq = np.zeros((2 * (n + m), 2 * (n + m)), dtype=bool)
    leq[: 2 * n, : 2 * n] = p.leq
    leq[2 * n :, 2 * n :] = q.leq
    labels = list(p.labels)
    for s in q.labels:
        while s in labels:
            s = s + "'"
        labels.append(s)
    return PocSet(n + m, leq, np.concatenate([p.weights, q.weights]), labels)


def xt_pocset(t: float) -> PocSet:
    """Seven-wall poc set whose weighted dual is the space ``X_t``.

    Walls are the singletons of ``{A, B, C, D}`` (weight ``1 - t``) and the
    pairs ``AB, AC, AD`` (weight ``t``).
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    halves = ["A", "B", "C", "D", "AB", "AC", "AD"]
    w = [1.0 - t] * 4 + [float(t)] * 3
    return pocset_from_halfspaces("ABCD", [set(h) for h in halves], labels=halves, weights=w)


def restrict(p: PocSet, walls: Sequence[int]) -> PocSet:
    walls = list(walls)
    codes = np.array([2 * w + b for w in walls for b in (0, 1)], dtype=int)
    return PocSet(len(walls), p.leq[np.ix_(codes, codes)], p.weights[walls], [p.labels[w] for w in walls])


def reduce_degenerate(p: PocSet) -> tuple[PocSet, dict[int, int]]:
    """Drop zero-weight walls.

    Returns the reduced poc set and a mapping from each kept original wall to
    its index in the reduced set.
    """
    kept = [i for i in range(p.n_walls) if p.weights[i] > 0]
    return restrict(p, kept), {old: new for new, old in enumerate(kept)}


def nested(p: PocSet, a, b) -> bool:
    a, b = _as_code(a), _as_code(b)
    return bool(p.nested_matrix[a, b])


def transverse(p: PocSet, a, b) -> bool:
    a, b = _as_code(a), _as_code(b)
    if a >> 1 == b >> 1:
        raise SameWall(f"elements {PocElement.from_code(a)} and {PocElement.from_code(b)} share a wall")
    return not p.nested_matrix[a, b]


def max_transverse_walls(p: PocSet) -> int:
    """Size of the largest pairwise transverse set of walls (dimension of the dual)."""
    import networkx as nx

    if p.n_walls == 0:
        return 0
    g = nx.Graph()
    g.add_nodes_from(range(p.n_walls))
    W = p.wall_nested
    g.add_edges_from((i, j) for i in range(p.n_walls) for j in range(i + 1, p.n_walls) if not W[i, j])
    return max(len(c) for c in nx.find_cliques(g))
