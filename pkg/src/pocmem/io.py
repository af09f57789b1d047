"""JSON formats for poc-sets, observers and weights."""
from __future__ import annotations

import json
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Mapping

from .median import Vertex
from .pocset import PocSet, close_order


def pocset_to_json(p: PocSet) -> dict:
    """``{"alphabet": [...], "relations": [[x, y], ...]}`` with generating relations only."""
    return {"alphabet": list(p.alphabet), "relations": [[x, y] for x, y in p.generators()]}


def pocset_from_json(data: Mapping) -> PocSet:
    if not isinstance(data, Mapping) or "alphabet" not in data:
        raise ValueError('a poc-set needs an "alphabet" list')
    rels = data.get("relations", [])
    for rel in rels:
        if not (isinstance(rel, (list, tuple)) and len(rel) == 2):
            raise ValueError(f"relation {rel!r} is not a pair")
    return close_order(data["alphabet"], [tuple(r) for r in rels])


def load_pocset(path: str | Path) -> PocSet:
    with open(path, encoding="utf-8") as fh:
        return pocset_from_json(json.load(fh))


def encode_weight(w: Real):
    if isinstance(w, Fraction):
        return str(w) if w.denominator != 1 else w.numerator
    return w


def decode_weight(w) -> Real:
    if isinstance(w, str):
        return Fraction(w)
    return w


def weights_to_json(vertices: tuple[Vertex, ...], p: Mapping[Vertex, Real]) -> dict:
    """Nonzero weights keyed by canonical vertex index."""
    return {str(i): encode_weight(p[v]) for i, v in enumerate(vertices) if p.get(v, 0)}


def weights_from_json(vertices: tuple[Vertex, ...], data: Mapping) -> dict[Vertex, Real]:
    return {vertices[int(i)]: decode_weight(w) for i, w in data.items()}


def observer_to_json(o) -> dict:
    return {
        "pocset": pocset_to_json(o.pocset),
        "epsilon": sorted(o.epsilon, key=o.pocset.index),
        "p": weights_to_json(o.graph.vertices, o.excitation),
    }


def observer_from_json(data: Mapping, realization=None):
    from .median import build_dual
    from .observer import Observer

    p = pocset_from_json(data["pocset"])
    g = build_dual(p)
    return Observer(p, weights_from_json(g.vertices, data["p"]), frozenset(data.get("epsilon", [])), realization)
