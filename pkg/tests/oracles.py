"""Brute-force reference computations used by the tests.

Nothing here uses the bitmask shortcuts of the library: vertices are found by
checking every *-selection against the definition of coherence, distances come
from breadth-first search, and intervals from the metric.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from functools import lru_cache

from pocmem.pocset import ClosureError, PocSet, close_order, neg


def _pair_options(s: str, t: str):
    yield None
    yield (s, t)
    yield (s, t + "*")
    yield (s + "*", t)
    yield (s + "*", t + "*")


@lru_cache(maxsize=None)
def all_pocsets(n: int) -> tuple[PocSet, ...]:
    """Every closed poc-set on tags t0..t{n-1} (labelled, not up to isomorphism)."""
    tags = [f"t{i}" for i in range(n)]
    pairs = list(itertools.combinations(tags, 2))
    out = {}
    for choice in itertools.product(*(list(_pair_options(s, t)) for s, t in pairs)):
        try:
            p = close_order(tags, [c for c in choice if c is not None])
        except ClosureError:
            continue
        out[p] = None
    return tuple(out)


def random_pocsets(count: int, max_tags: int, seed: int) -> list[PocSet]:
    """Random closures of random relation declarations; failures are redrawn."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, max_tags)
        tags = [f"t{i}" for i in range(n)]
        elements = tags + [t + "*" for t in tags]
        rels = []
        for _ in range(rng.randint(0, n + 1)):
            x, y = rng.sample(elements, 2)
            if x != neg(y):
                rels.append((x, y))
        try:
            out.append(close_order(tags, rels))
        except ClosureError:
            continue
    return out


def brute_vertices(p: PocSet) -> list[frozenset[str]]:
    """All maximal coherent *-selections, straight from the definition."""
    out = []
    for bits in itertools.product((0, 1), repeat=p.n):
        sel = frozenset(t if b else t + "*" for t, b in zip(p.alphabet, bits))
        if not any(p.leq(a, neg(b)) for a in sel for b in sel):
            out.append(sel)
    return out


def brute_edges(vertices: list[frozenset[str]]) -> set[frozenset[frozenset[str]]]:
    return {frozenset((u, v)) for u, v in itertools.combinations(vertices, 2) if len(u ^ v) == 2}


def bfs_all_pairs(g) -> dict:
    """Path distances from the adjacency of g."""
    adj = {v: [] for v in g.vertices}
    for i, j in g.edges:
        adj[g.vertices[i]].append(g.vertices[j])
        adj[g.vertices[j]].append(g.vertices[i])
    dist = {}
    for s in g.vertices:
        d = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in d:
                    d[y] = d[x] + 1
                    q.append(y)
        dist[s] = d
    return dist


def metric_interval(dist, vertices, u, v) -> frozenset:
    return frozenset(w for w in vertices if dist[u][w] + dist[w][v] == dist[u][v])


def interval_closure(intervals, W) -> frozenset:
    """Smallest superset of W closed under intervals, by fixpoint iteration."""
    W = set(W)
    while True:
        grown = set(W)
        for u in W:
            for v in W:
                grown |= intervals(u, v)
        if grown == W:
            return frozenset(W)
        W = grown


def sym_distance(u: frozenset, v: frozenset) -> int:
    return len(u ^ v) // 2


def nearest_in_halfspace(vertices: list[frozenset[str]], eps: frozenset[str], a: str) -> list[frozenset[str]]:
    """All Δ-nearest vertices to eps among those containing a."""
    candidates = [v for v in vertices if a in v]
    best = min(sym_distance(eps, v) for v in candidates)
    return [v for v in candidates if sym_distance(eps, v) == best]
