"""Structural updates: degeneration, expansion, weight transport and auditing.

A degeneration of Q into P is witnessed by a retraction r: Q -> P, a
poc-morphism that is the identity on the tags P keeps.  Its dual r° embeds
Γ(P) into Γ(Q) and carries weights forward by ``δ_r``: a vertex of Γ(Q) gets
the weight of its preimage, or 0 when it has none.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from numbers import Real
from typing import Iterable, Mapping

from .median import Corner, MedianGraph, Vertex, corner, dual_morphism
from .observer import Observer, _dual, prob
from .pocset import (
    PocMorphism,
    PocSet,
    PocSetError,
    closure_masks,
    is_trivial,
    neg,
    normalize,
    validate,
)

WEIGHT_TOLERANCE = 1e-12


class DeformationError(ValueError):
    """A structural move cannot be carried out."""


@dataclass(frozen=True)
class Retraction:
    """A poc-morphism Q -> P restricting to the identity on P's tags."""

    morphism: PocMorphism

    def __post_init__(self):
        q, p = self.morphism.source, self.morphism.target
        if not set(p.alphabet) <= set(q.alphabet):
            raise DeformationError("retraction target must have a subset of the source's tags")
        for t in p.alphabet:
            if self.morphism(t) != t:
                raise DeformationError(f"retraction moves the surviving tag {t}")

    @property
    def source(self) -> PocSet:
        return self.morphism.source

    @property
    def target(self) -> PocSet:
        return self.morphism.target

    @classmethod
    def identity(cls, p: PocSet) -> "Retraction":
        return cls(PocMorphism.identity(p))

    def merges(self) -> dict[str, str]:
        """Tags of Q not kept by P, with their images."""
        keep = set(self.target.alphabet)
        return {t: e for t, e in self.morphism.mapping if t not in keep}

    def dual(self) -> dict[Vertex, Vertex]:
        """r°: Γ(P) -> Γ(Q)."""
        return dual_morphism(self.morphism, _dual(self.source), _dual(self.target))

    def to_json(self) -> dict:
        from .io import pocset_to_json

        return {
            "source": pocset_to_json(self.source),
            "target": pocset_to_json(self.target),
            "map": dict(self.morphism.mapping),
        }


def degenerate(q: PocSet, a: str, b: str) -> tuple[PocSet, Retraction]:
    """Collapse the corner V(a, b) by adding a <= b* and closing.

    Elements the closure identifies are merged, the lexicographically smaller
    tag surviving.
    """
    a, b = normalize(a), normalize(b)
    if is_trivial(a) or is_trivial(b):
        raise DeformationError("corners need proper elements")
    if b in (a, neg(a)):
        raise DeformationError(f"{a} and {b} come from the same tag")
    if q.leq(a, neg(b)):
        return q, Retraction.identity(q)
    pairs = [(q.index(x), q.index(y)) for x, y in q.order]
    pairs.append((q.index(a), q.index(neg(b))))
    up = closure_masks(q.n, pairs)
    m = 2 * q.n
    for i in range(m):
        if up[i] >> (i ^ 1) & 1:
            raise DeformationError(f"degenerating ({a}, {b}) forces {q.name(i)} to be trivial")
    rep = {}
    for i in range(m):
        cls = [j for j in range(m) if j == i or (up[i] >> j & 1 and up[j] >> i & 1)]
        rep[i] = min(cls, key=lambda j: (q.alphabet[j >> 1], j))
    keep = [t for k, t in enumerate(q.alphabet) if rep[2 * k] >> 1 == k]
    keep_idx = {q.index(t) for t in keep} | {q.index(t) ^ 1 for t in keep}
    order = frozenset(
        (q.name(i), q.name(j)) for i in keep_idx for j in keep_idx if i != j and up[i] >> j & 1
    )
    p = PocSet(tuple(keep), order)
    problems = validate(p)
    if problems:  # pragma: no cover - closure guarantees validity
        raise DeformationError("; ".join(problems))
    mapping = {t: q.name(rep[2 * k]) for k, t in enumerate(q.alphabet)}
    return p, Retraction(PocMorphism(q, p, mapping))


def expand(
    p: PocSet, new_tag: str | None = None, *, relax: tuple[str, str] | None = None
) -> tuple[PocSet, Retraction]:
    """Inverse degeneration: add a fresh unrelated tag, or drop a covering relation.

    Returns Q and the retraction Q -> P.  A fresh tag is sent to 0 by the
    retraction, so old vertices reappear with the new question answered "no".
    """
    if (new_tag is None) == (relax is None):
        raise DeformationError("expand needs exactly one of new_tag or relax")
    if new_tag is not None:
        if new_tag in p.alphabet:
            raise DeformationError(f"tag {new_tag} already present")
        q = PocSet(p.alphabet + (new_tag,), p.order)
        mapping = {t: t for t in p.alphabet}
        mapping[new_tag] = "0"
        return q, Retraction(PocMorphism(q, p, mapping))
    x, y = (normalize(e) for e in relax)
    if is_trivial(x) or is_trivial(y) or not p.lt(x, y):
        raise DeformationError(f"{x} < {y} is not a relation of the poc-set")
    covers = p.covers()
    if (x, y) not in covers:
        raise DeformationError(f"{x} < {y} is implied by other relations and cannot be relaxed alone")
    kept = [(u, v) for u, v in covers if (u, v) not in ((x, y), (neg(y), neg(x)))]
    up = closure_masks(p.n, [(p.index(u), p.index(v)) for u, v in kept])
    order = frozenset(
        (p.name(i), p.name(j)) for i in range(2 * p.n) for j in range(2 * p.n) if up[i] >> j & 1
    )
    q = PocSet(p.alphabet, order)
    if validate(q):  # pragma: no cover
        raise DeformationError("relaxation breaks the poc-set axioms")
    return q, Retraction(PocMorphism(q, p, {t: t for t in p.alphabet}))


def _normalized(p: Mapping[Vertex, Real], what: str) -> dict[Vertex, Real]:
    total = sum(p.values())
    if total <= 0:
        raise DeformationError(f"{what} has no mass")
    exact = all(isinstance(w, (int, Fraction)) for w in p.values())
    off = total != 1 if exact else abs(total - 1) > WEIGHT_TOLERANCE
    if off:
        warnings.warn(f"{what} sums to {float(total)}; normalizing", stacklevel=3)
        return {v: w / total for v, w in p.items()}
    return dict(p)


def transport_weights(r: Retraction, p: Mapping[Vertex, Real]) -> dict[Vertex, Real]:
    """δ_r: weights on Γ(P) pushed to Γ(Q), zero off the image of r°."""
    p = _normalized(p, "weights")
    dual = r.dual()
    gq = _dual(r.source)
    out = {u: 0 for u in gq.vertices}
    for v, u in dual.items():
        out[u] = p.get(v, 0)
    return out


def pullback_weights(r: Retraction, q: Mapping[Vertex, Real]) -> dict[Vertex, Real]:
    """Weights on Γ(Q) read back along r°: v ↦ q(r°(v))."""
    return {v: q.get(u, 0) for v, u in r.dual().items()}


def corners(g: MedianGraph) -> list[Corner]:
    """All non-empty corners, in alphabet order of tag pairs."""
    out = []
    for s, t in combinations(g.source.alphabet, 2):
        for a, b in ((s, t), (s, neg(t)), (neg(s), t), (neg(s), neg(t))):
            c = corner(g, a, b)
            if not c.empty:
                out.append(c)
    return out


def degeneration_candidates(o: Observer, threshold: Real) -> list[Corner]:
    """Non-empty corners whose probability is below ``threshold``, least likely first."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    scored = [(prob(o, c.vertices), c) for c in corners(o.graph)]
    return [c for w, c in sorted((x for x in scored if x[0] < threshold), key=lambda x: x[0])]


# -- moves on observers --------------------------------------------------------


@dataclass(frozen=True)
class DeformationMove:
    """One elementary structural step; ``delta`` says which step it was."""

    kind: str  # "degeneration" | "expansion"
    retraction: Retraction
    delta: Mapping
    before: Mapping[Vertex, Real] = field(repr=False)
    after: Mapping[Vertex, Real] = field(repr=False)

    def transport_summary(self) -> dict:
        if self.kind == "degeneration":
            image = set(self.retraction.dual().values())
            kept = sum((w for u, w in self.before.items() if u in image), 0)
            total = sum(self.before.values())
            return {"massKept": _num(kept / total), "massDiscarded": _num(1 - kept / total)}
        return {"massKept": _num(1), "massDiscarded": _num(0)}


def _carry_epsilon(r: Retraction, eps: Iterable[str]) -> frozenset[str]:
    return frozenset(e for e in (r.morphism(x) for x in eps) if not is_trivial(e))


def apply_degeneration(o: Observer, a: str, b: str) -> tuple[Observer, DeformationMove]:
    """Degenerate the observer's poc-set along the corner (a, b).

    Weights are read back along r° and renormalized; the corner's mass is
    discarded.
    """
    p, r = degenerate(o.pocset, a, b)
    before = o.probabilities()
    after = pullback_weights(r, before)
    total = sum(after.values())
    if not total:
        raise DeformationError("all excitation sits in the collapsed corner")
    after = {v: w / total for v, w in after.items()}
    realization = None
    if o.realization is not None and not r.merges():
        try:
            realization = o.realization.restrict(p)
        except ValueError:
            realization = None  # the world contradicts the committed relation
    new = Observer(p, after, _carry_epsilon(r, o.epsilon), realization)
    delta = {"corner": [normalize(a), normalize(b)]}
    return new, DeformationMove("degeneration", r, delta, before, after)


def apply_expansion(
    o: Observer, new_tag: str | None = None, *, relax: tuple[str, str] | None = None
) -> tuple[Observer, DeformationMove]:
    """Expand the observer's poc-set; new vertices start with zero weight."""
    q, r = expand(o.pocset, new_tag, relax=relax)
    before = o.probabilities()
    after = transport_weights(r, before)
    realization = None
    if o.realization is not None and new_tag is None:
        realization = o.realization.restrict(q)
    new = Observer(q, after, o.epsilon, realization)
    delta = {"tag": new_tag} if new_tag is not None else {"relax": [normalize(x) for x in relax]}
    return new, DeformationMove("expansion", r, delta, before, after)


@dataclass
class MoveLog:
    """Observer snapshots with the move leading into each one after the first."""

    snapshots: list[Observer] = field(default_factory=list)
    moves: list[DeformationMove] = field(default_factory=list)

    def __post_init__(self):
        if self.snapshots and len(self.moves) != len(self.snapshots) - 1:
            raise ValueError("need exactly one move between consecutive snapshots")

    @classmethod
    def start(cls, o: Observer) -> "MoveLog":
        return cls([o], [])

    def append(self, move: DeformationMove, snapshot: Observer) -> None:
        self.moves.append(move)
        self.snapshots.append(snapshot)

    def to_jsonl(self) -> str:
        from .io import observer_to_json

        lines = []
        for i, move in enumerate(self.moves):
            rec = {
                "step": i,
                "kind": move.kind,
                "delta": dict(move.delta),
                "retraction": move.retraction.to_json(),
                "before": observer_to_json(self.snapshots[i]),
                "after": observer_to_json(self.snapshots[i + 1]),
                "transport": move.transport_summary(),
            }
            lines.append(json.dumps(rec, sort_keys=True, ensure_ascii=False))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_jsonl(cls, text: str) -> "MoveLog":
        from .io import observer_from_json, pocset_from_json

        log = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            before = observer_from_json(rec["before"])
            after = observer_from_json(rec["after"])
            rj = rec["retraction"]
            r = Retraction(PocMorphism(pocset_from_json(rj["source"]), pocset_from_json(rj["target"]), rj["map"]))
            move = DeformationMove(rec["kind"], r, rec["delta"], before.probabilities(), after.probabilities())
            if not log.snapshots:
                log.snapshots.append(before)
            log.append(move, after)
        return log


def _close(x: Real, y: Real) -> bool:
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return x == y
    return math.isclose(x, y, rel_tol=WEIGHT_TOLERANCE, abs_tol=WEIGHT_TOLERANCE)


def _check_step(prev: Observer, move: DeformationMove, nxt: Observer) -> str | None:
    r = move.retraction
    before, after = prev.probabilities(), nxt.probabilities()
    delta = dict(move.delta)
    if move.kind == "degeneration":
        if r.source != prev.pocset or r.target != nxt.pocset:
            return "retraction does not run from the earlier poc-set to the later one"
        if set(delta) != {"corner"}:
            return "degeneration must name exactly one corner"
        try:
            p, expected = degenerate(prev.pocset, *delta["corner"])
        except (DeformationError, PocSetError, KeyError) as exc:
            return f"recorded corner cannot be degenerated: {exc}"
        if p != nxt.pocset or expected.morphism.mapping != r.morphism.mapping:
            return "later poc-set is not the single-corner degeneration of the earlier one"
        pulled = pullback_weights(r, before)
        total = sum(pulled.values())
        if not total:
            return "no mass left after degeneration"
        bad = [v for v in after if not _close(after[v], pulled[v] / total)]
        return f"weights not transported along r° at {bad[:3]}" if bad else None
    if move.kind == "expansion":
        if r.source != nxt.pocset or r.target != prev.pocset:
            return "retraction does not run from the later poc-set to the earlier one"
        try:
            if set(delta) == {"tag"}:
                q, expected = expand(prev.pocset, delta["tag"])
            elif set(delta) == {"relax"}:
                q, expected = expand(prev.pocset, relax=tuple(delta["relax"]))
            else:
                return "expansion must add one tag or relax one relation"
        except (DeformationError, PocSetError, KeyError) as exc:
            return f"recorded expansion is invalid: {exc}"
        if q != nxt.pocset or expected.morphism.mapping != r.morphism.mapping:
            return "later poc-set is not the single-step expansion of the earlier one"
        pushed = transport_weights(r, before)
        bad = [u for u in after if not _close(after[u], pushed[u])]
        return f"weights not transported by δ_r at {bad[:3]}" if bad else None
    return f"unknown move kind {move.kind!r}"


def audit_postulate(log: MoveLog) -> tuple[bool, str | None]:
    """Check every consecutive pair of snapshots is one witnessed face move.

    Returns ``(True, None)`` or ``(False, description of the first violation)``.
    """
    if len(log.snapshots) < 2 or len(log.moves) != len(log.snapshots) - 1:
        raise ValueError("malformed move log: need >= 2 snapshots and one move between each")
    for i, move in enumerate(log.moves):
        problem = _check_step(log.snapshots[i], move, log.snapshots[i + 1])
        if problem:
            return False, f"step {i}: {problem}"
    return True, None


def _num(x: Real):
    return float(x)
