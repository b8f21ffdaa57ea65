"""Poc-set JSON documents.

A document lists wall names, generating relations between elements (``"x"``
is the positive side of wall ``x`` and ``"x*"`` its complement) and optional
weights::

    {"walls": ["a", "b"], "order": [["a", "b"]], "weights": {"a": 1.0, "b": 0.5}}

A document may instead name a built-in family::

    {"template": "xt", "params": {"t": 0.25}}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import DocumentError
from .pocset import (
    PocElement,
    PocSet,
    build_from_generators,
    linear_pocset,
    transverse_pocset,
    tree_pocset,
    xt_pocset,
)

TEMPLATES = {
    "xt": lambda t=0.5: xt_pocset(float(t)),
    "linear": lambda k: linear_pocset(int(k)),
    "transverse": lambda n: transverse_pocset(int(n)),
    "tree": lambda edges: tree_pocset([tuple(e) for e in edges]),
}


def _element(name: Any, index: dict[str, int]) -> PocElement:
    if not isinstance(name, str) or not name:
        raise DocumentError(f"element names must be strings, got {name!r}")
    star = name.endswith("*")
    base = name[:-1] if star else name
    if base not in index:
        raise DocumentError(f"unknown wall {base!r}")
    return PocElement(index[base], -1 if star else 1)


def pocset_from_document(doc: Any) -> PocSet:
    """Build a poc set; schema problems raise :class:`DocumentError`.

    Axiom failures propagate as :class:`~medianite.errors.AxiomViolation`.
    """
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if "template" in doc:
        name, params = doc["template"], doc.get("params", {})
        if name not in TEMPLATES or not isinstance(params, dict):
            raise DocumentError(f"unknown template {name!r}")
        try:
            p = TEMPLATES[name](**params)
        except TypeError as exc:
            raise DocumentError(f"bad parameters for template {name!r}: {exc}") from None
        if "weights" in doc:
            p = p.with_weights(_weights(doc["weights"], p.labels))
        return p
    walls = doc.get("walls")
    if not isinstance(walls, list) or not all(isinstance(w, str) and w and not w.endswith("*") for w in walls):
        raise DocumentError('"walls" must be a list of names without a trailing "*"')
    if len(set(walls)) != len(walls):
        raise DocumentError("wall names must be distinct")
    index = {w: i for i, w in enumerate(walls)}
    order = doc.get("order", [])
    if not isinstance(order, list):
        raise DocumentError('"order" must be a list of [lower, upper] pairs')
    rels = []
    for pair in order:
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError(f"order entry {pair!r} is not a pair")
        rels.append((_element(pair[0], index), _element(pair[1], index)))
    weights = _weights(doc["weights"], walls) if "weights" in doc else None
    return build_from_generators(len(walls), rels, weights, walls)


def _weights(raw: Any, labels) -> list[float]:
    if isinstance(raw, dict):
        unknown = set(raw) - set(labels)
        if unknown:
            raise DocumentError(f"weights given for unknown walls {sorted(unknown)}")
        missing = [w for w in labels if w not in raw]
        if missing:
            raise DocumentError(f"no weight given for walls {missing}")
        vals = [raw[w] for w in labels]
    elif isinstance(raw, list) and len(raw) == len(labels):
        vals = raw
    else:
        raise DocumentError('"weights" must map every wall to a number')
    try:
        out = [float(v) for v in vals]
    except (TypeError, ValueError):
        raise DocumentError("weights must be numbers") from None
    if any(v < 0 for v in out):
        raise DocumentError("weights must be nonnegative")
    return out


def pocset_to_document(p: PocSet) -> dict:
    """Canonical document: cover relations only, one per involution pair."""
    seen, order = set(), []
    for a, b in p.cover_relations():
        mirror = (b.star.code, a.star.code)
        if mirror in seen:
            continue
        seen.add((a.code, b.code))
        order.append([p.element_name(a), p.element_name(b)])
    return {"walls": list(p.labels), "order": order,
            "weights": {w: float(x) for w, x in zip(p.labels, p.weights)}}


def load_pocset(path: str | Path) -> PocSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON in {path}: {exc}") from None
    return pocset_from_document(doc)
