"""Observers and the excitation-propagation update of the current-state guess."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Real
from typing import Iterable, Mapping

from .median import MedianGraph, Vertex, build_dual
from .pocset import PocSet, is_trivial, neg, normalize
from .realization import Realization, is_consistent, objective_excitation, pi_x


@dataclass(frozen=True)
class Observer:
    """Questions, sensors, excitation weights on Γ(P), and the current guess ε.

    ``excitation`` is keyed by vertex mask; missing vertices weigh 0.  ``epsilon``
    is any set of proper elements and need not be coherent.
    """

    pocset: PocSet
    excitation: Mapping[Vertex, Real]
    epsilon: frozenset[str] = frozenset()
    realization: Realization | None = None

    def __post_init__(self):
        eps = frozenset(normalize(e) for e in self.epsilon)
        for e in eps:
            if is_trivial(e):
                raise ValueError("epsilon holds proper elements only")
            self.pocset.index(e)
        object.__setattr__(self, "epsilon", eps)
        g = self.graph
        p = {v: 0 for v in g.vertices}
        for v, w in dict(self.excitation).items():
            if v not in g:
                raise KeyError(f"excitation given on non-vertex {v}")
            if w < 0:
                raise ValueError("excitation must be nonnegative")
            p[v] = w
        if not any(p.values()):
            raise ValueError("excitation is identically zero")
        object.__setattr__(self, "excitation", p)
        if self.realization is not None and self.realization.pocset != self.pocset:
            raise ValueError("realization is for a different poc-set")

    @cached_property
    def graph(self) -> MedianGraph:
        return _dual(self.pocset)

    @classmethod
    def uniform(cls, pocset: PocSet, epsilon: Iterable[str] = ()) -> "Observer":
        g = _dual(pocset)
        return cls(pocset, {v: Fraction(1) for v in g.vertices}, frozenset(epsilon))

    @classmethod
    def objective(cls, r: Realization, x: int | None = None) -> "Observer":
        """Objective weights; ε = π(x) when a current atom is given, else empty."""
        eps = pi_x(r, x) if x is not None else frozenset()
        return cls(r.pocset, objective_excitation(r, _dual(r.pocset)), eps, r)

    def with_excitation(self, p: Mapping[Vertex, Real]) -> "Observer":
        """Replace p (re-evaluation happens outside the update algorithm)."""
        return replace(self, excitation=p)

    def with_epsilon(self, epsilon: Iterable[str]) -> "Observer":
        return replace(self, epsilon=frozenset(epsilon))

    def total(self) -> Real:
        return sum(self.excitation.values())

    def probabilities(self) -> dict[Vertex, Real]:
        total = self.total()
        return {v: w / total for v, w in self.excitation.items()}


@lru_cache(maxsize=256)
def _dual(p: PocSet) -> MedianGraph:
    return build_dual(p)


@lru_cache(maxsize=256)
def _hasse(p: PocSet) -> tuple[tuple[int, ...], ...]:
    """Immediate successors of each element index."""
    m = 2 * p.n
    succ = []
    for i in range(m):
        above = p.up_mask(i)
        row = []
        for j in range(m):
            if above >> j & 1 and not any(above >> k & 1 and p.up_mask(k) >> j & 1 for k in range(m)):
                row.append(j)
        succ.append(tuple(row))
    return tuple(succ)


def prob(o: Observer, F: Iterable[Vertex]) -> Real:
    """Pr_O[F] = p(F) / p(all vertices)."""
    total = o.total()
    if not total:
        raise ZeroDivisionError("total excitation is zero")
    F = set(F)
    for v in F:
        o.graph.index(v)
    return sum((o.excitation[v] for v in F), 0) / total


# -- propagation budgets ---------------------------------------------------------


@dataclass(frozen=True)
class HopBudget:
    """Reach elements at most ``hops`` covering steps above the observation.

    Steps into elements already ON in ε are free.
    """

    hops: float = math.inf

    def max_cost(self) -> float:
        return self.hops


@dataclass(frozen=True)
class ChargeBudget:
    """Charge ``initial * decay**cost`` keeps propagating while it is >= ``threshold``."""

    decay: float
    threshold: float
    initial: float = 1.0

    def max_cost(self) -> float:
        if self.initial < self.threshold:
            return -1
        if self.decay >= 1:
            return math.inf
        if self.decay <= 0:
            return 0
        d = 0
        while self.initial * self.decay ** (d + 1) >= self.threshold:
            d += 1
        return d


IDEALIZED = HopBudget()


def parse_budget(text: str) -> HopBudget | ChargeBudget:
    """``"3"``, ``"inf"`` or ``"charge:0.5,0.1"`` (decay, threshold)."""
    text = text.strip()
    if text.startswith("charge:"):
        decay, threshold = (float(x) for x in text[len("charge:"):].split(","))
        return ChargeBudget(decay, threshold)
    if text in ("inf", "∞"):
        return HopBudget()
    hops = int(text)
    if hops < 0:
        raise ValueError("hop budget must be nonnegative")
    return HopBudget(hops)


# -- updates -------------------------------------------------------------------


@dataclass(frozen=True)
class UpdateReport:
    observed: str
    flags: tuple[str, ...]
    removed: tuple[str, ...]
    added: tuple[str, ...]
    reached: tuple[str, ...]
    reached_all: bool
    visited: int
    coherent: bool

    def to_json(self) -> dict:
        return {
            "observed": self.observed,
            "flags": list(self.flags),
            "removed": list(self.removed),
            "added": list(self.added),
            "reached": list(self.reached),
            "reachedAll": self.reached_all,
            "visited": self.visited,
            "coherent": self.coherent,
        }


def _propagate(p: PocSet, start: int, on_mask: int, max_cost: float) -> tuple[int, int]:
    """Elements excited from ``start``; 0-1 BFS where ON elements cost nothing."""
    succ = _hasse(p)
    best = {start: 0}
    settled = 0
    visited = 0
    queue = deque([start])
    while queue:
        i = queue.popleft()
        if settled >> i & 1:
            continue
        settled |= 1 << i
        visited += 1
        for j in succ[i]:
            c = best[i] + (0 if on_mask >> j & 1 else 1)
            if c <= max_cost and c < best.get(j, math.inf):
                best[j] = c
                if c == best[i]:
                    queue.appendleft(j)
                else:
                    queue.append(j)
    return settled, visited


def _update(o: Observer, a: str, budget) -> tuple[Observer, UpdateReport]:
    a = normalize(a)
    if is_trivial(a):
        raise ValueError("cannot observe a trivial element")
    p = o.pocset
    start = p.index(a)
    eps_mask = p.mask_of(o.epsilon)
    reached, visited = _propagate(p, start, eps_mask, budget.max_cost())
    full = p.up_mask(start) | 1 << start
    flagged = [i for i in range(2 * p.n) if reached >> i & 1 and eps_mask >> (i ^ 1) & 1]
    new_mask = eps_mask
    for i in flagged:
        new_mask &= ~(1 << (i ^ 1))
        new_mask |= 1 << i
    new_mask |= 1 << start
    names = p.name
    eps2 = p.names(new_mask)
    report = UpdateReport(
        observed=a,
        flags=tuple(names(i) for i in flagged),
        removed=tuple(names(i ^ 1) for i in flagged),
        added=tuple(names(i) for i in range(2 * p.n) if new_mask >> i & 1 and not eps_mask >> i & 1),
        reached=tuple(names(i) for i in range(2 * p.n) if reached >> i & 1),
        reached_all=reached == full,
        visited=visited,
        coherent=not _incoherent_pairs(p, new_mask),
    )
    return replace(o, epsilon=eps2), report


def update_idealized(o: Observer, a: str) -> tuple[Observer, UpdateReport]:
    """Excite every b >= a; for each b with b* in ε, turn b* off and b on."""
    return _update(o, a, IDEALIZED)


def update_dissipative(o: Observer, a: str, budget: HopBudget | ChargeBudget) -> tuple[Observer, UpdateReport]:
    """As :func:`update_idealized` but excitation only reaches what the budget allows.

    The result may be incoherent; that is reported, not corrected.
    """
    return _update(o, a, budget)


def _incoherent_pairs(p: PocSet, mask: int) -> list[tuple[int, int]]:
    out = []
    for i in range(2 * p.n):
        if not mask >> i & 1:
            continue
        up = p.up_mask(i) | 1 << i
        for j in range(i + 1, 2 * p.n):
            if mask >> j & 1 and up >> (j ^ 1) & 1:
                out.append((i, j))
    return out


def coherence_check(o: Observer) -> list[tuple[str, str]]:
    """All pairs a, b in ε with a <= b*."""
    p = o.pocset
    return [(p.name(i), p.name(j)) for i, j in _incoherent_pairs(p, p.mask_of(o.epsilon))]


class Perception(Enum):
    EXACT = "exact"
    INCOMPLETE = "incomplete"
    CONTRADICTED = "contradicted"


@dataclass(frozen=True)
class MisperceptionReport:
    status: Perception
    truth: frozenset[str]
    zero_weight_consistent: tuple[Vertex, ...]
    inconsistent_positive: tuple[Vertex, ...]

    def to_json(self, g: MedianGraph | None = None) -> dict:
        label = (lambda v: g.positive_tags(v)) if g is not None else (lambda v: v)
        return {
            "status": self.status.value,
            "truth": sorted(self.truth),
            "zeroWeightConsistent": [label(v) for v in self.zero_weight_consistent],
            "inconsistentPositive": [label(v) for v in self.inconsistent_positive],
        }


def misperception_report(o: Observer, x: int) -> MisperceptionReport:
    r = o.realization
    if r is None:
        raise ValueError("observer has no realization attached")
    truth = pi_x(r, x)
    if not o.epsilon <= truth:
        status = Perception.CONTRADICTED
    elif o.epsilon == truth:
        status = Perception.EXACT
    else:
        status = Perception.INCOMPLETE
    g = o.graph
    zero, positive = [], []
    for v in g.vertices:
        consistent = is_consistent(r, g.selection(v))
        w = o.excitation[v]
        if consistent and w == 0:
            zero.append(v)
        elif not consistent and w > 0:
            positive.append(v)
    return MisperceptionReport(status, truth, tuple(zero), tuple(positive))
