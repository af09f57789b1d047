"""Finite worlds, sensor maps and the graph of visible states.

A :class:`World` is a finite set of atoms ``0..n-1`` with probability
weights; it stands in for a measurable state space because every computation
here only sees the partition generated by the sensors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping, Sequence

from . import catalog
from .median import MedianGraph, Vertex, build_dual
from .pocset import ONE, ZERO, PocSet, normalize, tag_of

MU_TOLERANCE = 1e-9


@dataclass(frozen=True)
class World:
    mu: tuple[Real, ...]

    def __post_init__(self):
        mu = tuple(self.mu)
        if not mu:
            raise ValueError("a world needs at least one atom")
        if any(w < 0 for w in mu):
            raise ValueError("atom weights must be nonnegative")
        if abs(sum(mu) - 1) > MU_TOLERANCE:
            raise ValueError(f"atom weights sum to {float(sum(mu))}, not 1")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def uniform(cls, n: int) -> "World":
        return cls(tuple(Fraction(1, n) for _ in range(n)))

    @property
    def atoms(self) -> range:
        return range(len(self.mu))

    def measure(self, atoms: Iterable[int]):
        return sum((self.mu[x] for x in atoms), Fraction(0))


@dataclass(frozen=True)
class Realization:
    """A sensor map f: P -> subsets of atoms, stored on positive tags only."""

    pocset: PocSet
    world: World
    sensors: Mapping[str, frozenset[int]]
    _masks: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        sensors = {t: frozenset(s) for t, s in dict(self.sensors).items()}
        if set(sensors) != set(self.pocset.alphabet):
            raise ValueError("sensors must be given for exactly the alphabet's tags")
        n = len(self.world.mu)
        for t, s in sensors.items():
            if any(not 0 <= x < n for x in s):
                raise ValueError(f"sensor {t} mentions atoms outside the world")
        object.__setattr__(self, "sensors", sensors)
        # atom -> vertex mask
        masks = []
        for x in range(n):
            m = 0
            for k, t in enumerate(self.pocset.alphabet):
                if x in sensors[t]:
                    m |= 1 << k
            masks.append(m)
        object.__setattr__(self, "_masks", tuple(masks))
        for a, b in sorted(self.pocset.order):
            if not self.sensor(a) <= self.sensor(b):
                raise ValueError(f"sensor map is not order-preserving: {a} < {b}")

    def __hash__(self):
        return hash((self.pocset, self.world, tuple(sorted((t, tuple(sorted(s))) for t, s in self.sensors.items()))))

    def sensor(self, element: str) -> frozenset[int]:
        element = normalize(element)
        if element == ZERO:
            return frozenset()
        if element == ONE:
            return frozenset(self.world.atoms)
        s = self.sensors[tag_of(element)]
        if element.endswith("*"):
            return frozenset(self.world.atoms) - s
        return s

    def profile(self, x: int) -> Vertex:
        """π(x) as a vertex mask."""
        return self._masks[x]

    def restrict(self, pocset: PocSet) -> "Realization":
        """Same sensors on a poc-set with a subset of the tags."""
        return Realization(pocset, self.world, {t: self.sensors[t] for t in pocset.alphabet})


def pi_x(r: Realization, x: int) -> frozenset[str]:
    """All proper elements whose sensor fires at atom x."""
    if not 0 <= x < len(r.world.mu):
        raise KeyError(f"unknown atom {x}")
    m = r.profile(x)
    return frozenset(t if m >> k & 1 else t + "*" for k, t in enumerate(r.pocset.alphabet))


def is_consistent(r: Realization, u: Iterable[str], positive_measure: bool = False) -> bool:
    """True iff the sensors of u have a common atom (of positive weight, if asked)."""
    common = set(r.world.atoms)
    for e in u:
        common &= r.sensor(e)
        if not common:
            return False
    if positive_measure:
        return any(r.world.mu[x] > 0 for x in common)
    return bool(common)


def consistent_vertices(r: Realization, g: MedianGraph | None = None, positive_measure: bool = False) -> frozenset[Vertex]:
    g = g or build_dual(r.pocset)
    return frozenset(
        r.profile(x) for x in r.world.atoms if not positive_measure or r.world.mu[x] > 0
    ) & frozenset(g.vertices)


@dataclass(frozen=True)
class VisibleGraph:
    """Visible states (atom classes) with their embedding into Γ(P)."""

    states: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    embedding: tuple[Vertex, ...]

    def degrees(self) -> list[int]:
        deg = [0] * len(self.states)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


def visible_graph(r: Realization) -> VisibleGraph:
    """Γ(P, f): atoms grouped by their answer profile.

    Two states are adjacent iff exactly one set of f(P) contains one state and
    misses the other.
    """
    classes: dict[int, set[int]] = {}
    for x in r.world.atoms:
        classes.setdefault(r.profile(x), set()).add(x)
    profiles = sorted(classes)
    states = tuple(frozenset(classes[m]) for m in profiles)
    # distinct subsets in H = f(P), each with its complement
    walls = {r.sensors[t] for t in r.pocset.alphabet}
    edges = []
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            xi, xj = next(iter(states[i])), next(iter(states[j]))
            separating = sum(1 for h in walls if (xi in h) != (xj in h))
            if separating == 1:
                edges.append((i, j))
    return VisibleGraph(states, tuple(edges), tuple(profiles))


def objective_excitation(r: Realization, g: MedianGraph | None = None) -> dict[Vertex, Real]:
    """p(u) = μ(∩_{a∈u} f(a)) for every vertex of Γ(P)."""
    g = g or build_dual(r.pocset)
    p = {v: Fraction(0) for v in g.vertices}
    for x in r.world.atoms:
        p[r.profile(x)] = p[r.profile(x)] + r.world.mu[x]
    return p


# -- built-in scenarios --------------------------------------------------------

COMPASS_CENTERS = {"n": 0.0, "w": 90.0, "s": 180.0, "e": 270.0}


def _in_arc(angle: float, center: float, half_width: float) -> bool:
    d = (angle - center + 180.0) % 360.0 - 180.0
    return abs(d) < half_width


def compass(epsilon_degrees: float, atoms: int = 360) -> Realization:
    """Needle positions on a circle cut into ``atoms`` equal arcs.

    Atom ``i`` covers ``[i*w, (i+1)*w)`` degrees with ``w = 360/atoms`` and is
    placed in a sensor arc when its midpoint is; North is at 0°, West at 90°.
    Each sensor fires on the open arc of half-width ``epsilon_degrees``.
    """
    if not 0 < epsilon_degrees < 90:
        raise ValueError("epsilon must lie in (0, 90) degrees")
    width = 360.0 / atoms
    mids = [(i + 0.5) * width for i in range(atoms)]
    sensors = {
        t: frozenset(i for i, a in enumerate(mids) if _in_arc(a, c, epsilon_degrees))
        for t, c in COMPASS_CENTERS.items()
    }
    return Realization(catalog.compass(), World.uniform(atoms), sensors)


def compass_atom(angle_degrees: float, atoms: int = 360) -> int:
    """Index of the compass atom containing the given angle."""
    return int(math.floor((angle_degrees % 360.0) / (360.0 / atoms))) % atoms


def grid(m: int, n: int) -> Realization:
    """Integer points (i, j), 1<=i<=m+1, 1<=j<=n+1, with the cut sensors of the grid."""
    points = [(i, j) for i in range(1, m + 2) for j in range(1, n + 2)]
    sensors = {f"v{t}": frozenset(k for k, (i, _) in enumerate(points) if i < t + 0.5) for t in range(1, m + 1)}
    sensors.update({f"h{s}": frozenset(k for k, (_, j) in enumerate(points) if j < s + 0.5) for s in range(1, n + 1)})
    return Realization(catalog.grid(m, n), World.uniform(len(points)), sensors)


def grid_point(x: int, n: int) -> tuple[int, int]:
    """Coordinates of atom ``x`` of ``grid(m, n)``."""
    i, j = divmod(x, n + 1)
    return i + 1, j + 1


def from_json(data: Mapping, pocset: PocSet) -> Realization:
    """``{"atoms": n, "mu": [...], "sensors": {"tag": [atom indices]}}``."""
    n = int(data["atoms"])
    mu = data.get("mu")
    world = World.uniform(n) if mu is None else World(tuple(_number(w) for w in mu))
    if len(world.mu) != n:
        raise ValueError("mu must list one weight per atom")
    return Realization(pocset, world, {t: frozenset(v) for t, v in data["sensors"].items()})


def to_json(r: Realization) -> dict:
    return {
        "atoms": len(r.world.mu),
        "mu": [float(w) for w in r.world.mu],
        "sensors": {t: sorted(r.sensors[t]) for t in r.pocset.alphabet},
    }


def _number(w) -> Real:
    if isinstance(w, str):
        return Fraction(w)
    return w
