"""The dual median graph of a poc-set.

A vertex is stored as an ``int`` bitmask over the alphabet: bit ``k`` set means
the vertex answers tag ``k`` positively (contains ``t``), clear means it
contains ``t*``.  With this encoding the median is bitwise majority, the
distance is a popcount and intervals are agreement masks.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .pocset import (
    ZERO,
    ONE,
    MorphismError,
    PocMorphism,
    PocSet,
    PocSetError,
    is_nested_with_all,
    is_trivial,
    neg,
    normalize,
    validate,
)

DEFAULT_MAX_TAGS = 20

Vertex = int


class SizeGuardError(RuntimeError):
    """The alphabet is too large to enumerate the dual graph."""


def max_tags_default() -> int:
    value = os.environ.get("POCMEM_MAX_TAGS")
    return int(value) if value else DEFAULT_MAX_TAGS


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _enumerate_vertices(p: PocSet) -> list[int]:
    n = p.n
    # conflict[i]: elements j with i <= j*, i.e. i and j cannot both be chosen
    conflict = [0] * (2 * n)
    for i in range(2 * n):
        up = p.up_mask(i)
        for j in range(2 * n):
            if up >> (j ^ 1) & 1:
                conflict[i] |= 1 << j
    out = []

    def extend(k: int, chosen: int, vertex: int) -> None:
        if k == n:
            out.append(vertex)
            return
        for i, bit in ((2 * k + 1, 0), (2 * k, 1)):
            if not conflict[i] & chosen:
                extend(k + 1, chosen | 1 << i, vertex | bit << k)

    extend(0, 0, 0)
    return sorted(out)


@dataclass(frozen=True)
class MedianGraph:
    source: PocSet
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    _index: dict = field(repr=False, compare=False, hash=False)
    _adj: tuple = field(repr=False, compare=False, hash=False)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise KeyError(f"{v!r} is not a vertex of this graph") from None

    def neighbors(self, v: Vertex) -> tuple[Vertex, ...]:
        return tuple(self.vertices[j] for j in self._adj[self.index(v)])

    def selection(self, v: Vertex) -> frozenset[str]:
        """The vertex as a set of proper elements."""
        self.index(v)
        return frozenset(t if v >> k & 1 else t + "*" for k, t in enumerate(self.source.alphabet))

    def positive_tags(self, v: Vertex) -> list[str]:
        return [t for k, t in enumerate(self.source.alphabet) if v >> k & 1]

    def vertex(self, selection: Iterable[str]) -> Vertex:
        """Vertex whose selection is exactly ``selection`` (trivial 1 allowed)."""
        sel = {normalize(e) for e in selection} - {ONE}
        v = 0
        for k, t in enumerate(self.source.alphabet):
            if t in sel and t + "*" not in sel:
                v |= 1 << k
            elif not (t + "*" in sel and t not in sel):
                raise KeyError(f"{sorted(sel)} is not a *-selection")
        if len(sel) != self.source.n:
            raise KeyError(f"{sorted(sel)} mentions unknown elements")
        self.index(v)
        return v

    def contains(self, v: Vertex, element: str) -> bool:
        element = normalize(element)
        if element == ONE:
            return True
        if element == ZERO:
            return False
        i = self.source.index(element)
        return (v >> (i >> 1) & 1) != (i & 1)

    def halfspace(self, element: str) -> frozenset[Vertex]:
        """V(a): vertices containing ``element``."""
        return frozenset(v for v in self.vertices if self.contains(v, element))

    def halfspaces(self) -> dict[str, frozenset[Vertex]]:
        return {e: self.halfspace(e) for e in self.source.elements()}

    def edge_label(self, u: Vertex, v: Vertex) -> str:
        diff = u ^ v
        k = diff.bit_length() - 1
        return self.source.alphabet[k]

    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertices) - 1 and is_connected(self)

    def to_json(self) -> dict:
        return {
            "vertices": [self.positive_tags(v) for v in self.vertices],
            "edges": [list(e) for e in self.edges],
            "halfspaces": {
                t: [i for i, v in enumerate(self.vertices) if v >> k & 1]
                for k, t in enumerate(self.source.alphabet)
            },
        }

    def to_dot(self) -> str:
        lines = ["graph dual {"]
        for i, v in enumerate(self.vertices):
            label = "{" + ",".join(self.positive_tags(v)) + "}"
            lines.append(f'  v{i} [label="{label}"];')
        for i, j in self.edges:
            label = self.edge_label(self.vertices[i], self.vertices[j])
            lines.append(f'  v{i} -- v{j} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_dual(p: PocSet, max_tags: int | None = None) -> MedianGraph:
    """Γ(P): all maximal coherent *-selections, joined when they differ in one tag."""
    limit = max_tags_default() if max_tags is None else max_tags
    if p.n > limit:
        raise SizeGuardError(f"{p.n} tags exceeds the size guard of {limit}")
    problems = validate(p)
    if problems:
        raise PocSetError("not a valid poc-set: " + "; ".join(problems))
    verts = _enumerate_vertices(p)
    index = {v: i for i, v in enumerate(verts)}
    adj = [[] for _ in verts]
    edges = []
    for i, v in enumerate(verts):
        for k in range(p.n):
            j = index.get(v ^ (1 << k))
            if j is not None and j > i:
                edges.append((i, j))
                adj[i].append(j)
                adj[j].append(i)
    return MedianGraph(p, tuple(verts), tuple(edges), index, tuple(tuple(a) for a in adj))


def is_connected(g: MedianGraph) -> bool:
    if not g.vertices:
        return False
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in g._adj[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == len(g.vertices)


def is_bipartite(g: MedianGraph) -> bool:
    return all(_popcount(g.vertices[i]) % 2 != _popcount(g.vertices[j]) % 2 for i, j in g.edges)


def distance(g: MedianGraph, u: Vertex, v: Vertex) -> int:
    """Number of questions separating u from v."""
    g.index(u), g.index(v)
    return _popcount(u ^ v)


def median(g: MedianGraph, u: Vertex, v: Vertex, w: Vertex) -> Vertex:
    for x in (u, v, w):
        g.index(x)
    return (u & v) | (v & w) | (u & w)


def interval(g: MedianGraph, u: Vertex, v: Vertex) -> frozenset[Vertex]:
    """Vertices on geodesics from u to v: those containing u ∩ v."""
    g.index(u), g.index(v)
    agree = ~(u ^ v)
    return frozenset(w for w in g.vertices if not (w ^ u) & agree)


def is_convex(g: MedianGraph, W: Iterable[Vertex]) -> bool:
    W = set(W)
    return all(interval(g, u, v) <= W for u in W for v in W)


def convex_hull(g: MedianGraph, W: Iterable[Vertex]) -> frozenset[Vertex]:
    """Intersection of all halfspaces containing W."""
    W = list(W)
    if not W:
        raise ValueError("convex hull of an empty set")
    for w in W:
        g.index(w)
    full = (1 << g.source.n) - 1
    ones = full
    zeros = full
    for w in W:
        ones &= w
        zeros &= ~w
    fixed = ones | zeros
    return frozenset(v for v in g.vertices if not (v ^ ones) & fixed)


def dual_morphism(
    f: PocMorphism, source_graph: MedianGraph | None = None, target_graph: MedianGraph | None = None
) -> dict[Vertex, Vertex]:
    """f°: Γ(target) -> Γ(source), v ↦ f⁻¹(v)."""
    if not isinstance(f, PocMorphism):
        raise MorphismError("dual_morphism needs a PocMorphism")
    gp = source_graph or build_dual(f.source)
    gq = target_graph or build_dual(f.target)
    images = [f(t) for t in f.source.alphabet]
    out = {}
    for v in gq.vertices:
        u = 0
        for k, e in enumerate(images):
            if gq.contains(v, e):
                u |= 1 << k
        gp.index(u)
        out[v] = u
    return out


@dataclass(frozen=True)
class Corner:
    a: str
    b: str
    vertices: frozenset[Vertex]
    graph: MedianGraph = field(repr=False, compare=False)

    @property
    def empty(self) -> bool:
        return not self.vertices

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        """Edges of the induced subgraph."""
        vs = self.graph.vertices
        return [(vs[i], vs[j]) for i, j in self.graph.edges if vs[i] in self.vertices and vs[j] in self.vertices]


def corner(g: MedianGraph, a: str, b: str) -> Corner:
    a, b = normalize(a), normalize(b)
    if is_trivial(a) or is_trivial(b):
        raise ValueError("corners need proper elements")
    if b in (a, neg(a)):
        raise ValueError(f"{a} and {b} come from the same tag")
    return Corner(a, b, g.halfspace(a) & g.halfspace(b), g)


def is_cut_edge_element(p: PocSet, a: str) -> bool:
    """True iff a is nested with every element of P."""
    if is_trivial(a):
        raise ValueError("cut-edge test needs a proper element")
    p.index(a)
    return is_nested_with_all(p, a)


def has_unique_cut_edge(g: MedianGraph, a: str) -> bool:
    """True iff exactly one edge flips a, and removing it disconnects g."""
    k = g.source.index(a) >> 1
    flips = [(i, j) for i, j in g.edges if g.vertices[i] ^ g.vertices[j] == 1 << k]
    if len(flips) != 1:
        return False
    cut = flips[0]
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in g._adj[i]:
            if (min(i, j), max(i, j)) == cut or j in seen:
                continue
            seen.add(j)
            queue.append(j)
    return len(seen) < len(g.vertices)


def halfspace_pocset(g: MedianGraph) -> PocSet:
    """The poc-set of halfspaces {V(a)} ordered by inclusion, labelled by P's names.

    Only the vertex sets are consulted, never the source order.
    """
    hs = g.halfspaces()
    els = list(hs)
    for x in els:
        if not hs[x] or len(hs[x]) == len(g.vertices):
            raise PocSetError(f"halfspace {x} is trivial")
    order = frozenset((x, y) for x in els for y in els if x != y and hs[x] < hs[y])
    return PocSet(g.source.alphabet, order)
