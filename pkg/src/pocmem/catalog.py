"""Standard poc-sets used throughout the package and its tests."""
from __future__ import annotations

from .pocset import PocSet, close_order


def cube(n: int, prefix: str = "a") -> PocSet:
    """n tags, no relations: the dual graph is the n-cube."""
    return close_order([f"{prefix}{i}" for i in range(1, n + 1)])


def pompom(n: int, prefix: str = "a") -> PocSet:
    """Tags a1..an with a_i* < a_j for i < j: the dual is a star with n leaves."""
    tags = [f"{prefix}{i}" for i in range(1, n + 1)]
    rels = [(tags[i] + "*", tags[j]) for i in range(n) for j in range(i + 1, n)]
    return close_order(tags, rels)


def chain(n: int, prefix: str = "b") -> PocSet:
    """Tags b1 < b2 < ... < bn."""
    tags = [f"{prefix}{i}" for i in range(1, n + 1)]
    return close_order(tags, [(tags[i], tags[i + 1]) for i in range(n - 1)])


def compass() -> PocSet:
    """North/South/West/East with n < s*, w < e* and their consequences."""
    return close_order(["n", "s", "w", "e"], [("n", "s*"), ("w", "e*")])


def grid(m: int, n: int) -> PocSet:
    """Vertical cuts v1 < ... < vm and horizontal cuts h1 < ... < hn.

    v_t answers "x < t + 1/2", h_s answers "y < s + 1/2"; the dual graph is the
    (m+1) x (n+1) grid.
    """
    v = [f"v{t}" for t in range(1, m + 1)]
    h = [f"h{s}" for s in range(1, n + 1)]
    rels = [(v[i], v[i + 1]) for i in range(m - 1)] + [(h[i], h[i + 1]) for i in range(n - 1)]
    return close_order(v + h, rels)
