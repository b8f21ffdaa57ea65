"""Deterministic test catalog: structured families plus random subset poc sets."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .dual import vertex_bits
from .pocset import (
    PocSet,
    linear_pocset,
    max_transverse_walls,
    pocset_from_halfspaces,
    transverse_pocset,
    tree_pocset,
    wedge_sum,
    xt_pocset,
)

TREES = {
    "star3": [(0, 1), (0, 2), (0, 3)],
    "star4": [(0, 1), (0, 2), (0, 3), (0, 4)],
    "star5": [(0, i) for i in range(1, 6)],
    "star6": [(0, i) for i in range(1, 7)],
    "path4": [(0, 1), (1, 2), (2, 3), (3, 4)],
    "spider211": [(0, 1), (1, 2), (0, 3), (0, 4)],
    "spider221": [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5)],
    "spider222": [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)],
    "doublestar": [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (3, 6)],
    "caterpillar": [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5)],
}


def structured() -> list[tuple[str, PocSet]]:
    out = [(f"linear{k}", linear_pocset(k)) for k in range(1, 7)]
    out += [(f"transverse{k}", transverse_pocset(k)) for k in range(1, 5)]
    out += [(f"tree_{name}", tree_pocset(edges)) for name, edges in TREES.items()]
    lin = lambda k, pre="a": linear_pocset(k, prefix=pre)  # noqa: E731
    star3 = tree_pocset(TREES["star3"])
    out += [
        ("grid2x1", wedge_sum(lin(2), lin(1, "b"))),
        ("grid2x2", wedge_sum(lin(2), lin(2, "b"))),
        ("grid3x1", wedge_sum(lin(3), lin(1, "b"))),
        ("grid3x2", wedge_sum(lin(3), lin(2, "b"))),
        ("star3_x_lin1", wedge_sum(star3, lin(1, "b"))),
        ("star3_x_lin2", wedge_sum(star3, lin(2, "b"))),
        ("grid2x1x1", wedge_sum(wedge_sum(lin(2), lin(1, "b")), lin(1, "c"))),
        ("star3_x_star3", wedge_sum(star3, star3)),
    ]
    out += [("xt", xt_pocset(0.25))]
    return out


def random_pocset(rng: np.random.Generator, ground_size: int | None = None, max_walls: int = 8) -> PocSet:
    """Random sub poc set of the power set of a small ground set."""
    g = int(rng.integers(4, 6)) if ground_size is None else ground_size
    ground = list(range(g))
    walls = {}
    for r in range(1, g // 2 + 1):
        for s in combinations(ground, r):
            s = frozenset(s)
            key = min(s, frozenset(ground) - s, key=sorted)
            walls[tuple(sorted(key))] = key
    keys = sorted(walls)
    k = int(rng.integers(2, min(max_walls, len(keys)) + 1))
    pick = rng.choice(len(keys), size=k, replace=False)
    halves = []
    for i in sorted(pick):
        h = walls[keys[i]]
        halves.append(h if rng.random() < 0.5 else frozenset(ground) - h)
    return pocset_from_halfspaces(ground, halves, labels=[f"h{i}" for i in range(k)])


def random_catalog(count: int = 30, seed: int = 20240, max_walls: int = 8, max_dim: int = 3,
                   max_vertices: int = 40) -> list[tuple[str, PocSet]]:
    """``count`` random subset poc sets with bounded dimension and vertex count."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        p = random_pocset(rng, max_walls=max_walls)
        if max_transverse_walls(p) > max_dim or len(vertex_bits(p)) > max_vertices:
            continue
        out.append((f"random{len(out):02d}", p))
    return out


def catalog(random_count: int = 30, seed: int = 20240) -> list[tuple[str, PocSet]]:
    return structured() + random_catalog(random_count, seed)
