"""Finite poc-sets: partially ordered sets with an order-reversing complement.

Elements are named by strings.  A tag ``"a"`` names a proper element and
``"a*"`` its complement; ``"0"`` and ``"1"`` are the trivial elements and are
never part of an alphabet.  The unicode asterisk ``"∗"`` is accepted on input
and normalized to ``"*"``.

Internally every proper element gets an index: tag ``k`` is ``2k`` and its
complement ``2k + 1``, so complementation is ``i ^ 1``.  Orders are stored as
bitmasks of strictly-greater elements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

ZERO = "0"
ONE = "1"
STAR = "*"


class PocSetError(ValueError):
    """Raised for malformed poc-set input."""


class ClosureError(PocSetError):
    """Raised when closing a relation set violates the poc-set axioms."""


class MorphismError(ValueError):
    """Raised for maps that are not poc-morphisms."""


def normalize(element: str) -> str:
    element = element.strip().replace("∗", STAR)
    if element == ZERO + STAR:
        return ONE
    if element == ONE + STAR:
        return ZERO
    if element.endswith(STAR + STAR):
        return normalize(element[:-2])
    return element


def neg(element: str) -> str:
    """Complement of an element name."""
    element = normalize(element)
    if element == ZERO:
        return ONE
    if element == ONE:
        return ZERO
    if element.endswith(STAR):
        return element[:-1]
    return element + STAR


def tag_of(element: str) -> str:
    element = normalize(element)
    return element[:-1] if element.endswith(STAR) else element


def is_trivial(element: str) -> bool:
    return normalize(element) in (ZERO, ONE)


def _check_tag(tag: str) -> None:
    if not isinstance(tag, str) or not tag or tag in (ZERO, ONE) or STAR in tag or "∗" in tag:
        raise PocSetError(f"invalid tag {tag!r}")


def _transitive_closure(up: list[int]) -> list[int]:
    up = list(up)
    # Warshall over bitmasks
    for k in range(len(up)):
        bit = 1 << k
        above_k = up[k]
        for i in range(len(up)):
            if up[i] & bit:
                up[i] |= above_k
    return up


@dataclass(frozen=True)
class PocSet:
    """A finite poc-set over a tag alphabet.

    ``order`` holds pairs ``(x, y)`` meaning ``x < y`` between proper
    elements.  Instances built through :func:`close_order` are closed and
    valid; instances built directly are taken as given, and :func:`validate`
    reports what is wrong with them.
    """

    alphabet: tuple[str, ...]
    order: frozenset[tuple[str, str]] = frozenset()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _up: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        for t in alphabet:
            _check_tag(t)
        if len(set(alphabet)) != len(alphabet):
            raise PocSetError("duplicate tags in alphabet")
        order = frozenset((normalize(x), normalize(y)) for x, y in self.order)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "order", order)
        index = {}
        for k, t in enumerate(alphabet):
            index[t] = 2 * k
            index[t + STAR] = 2 * k + 1
        up = [0] * (2 * len(alphabet))
        for x, y in order:
            if x not in index or y not in index:
                raise PocSetError(f"relation {x}<{y} mentions an element outside the alphabet")
            up[index[x]] |= 1 << index[y]
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_up", tuple(up))

    # -- element bookkeeping -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.alphabet)

    def elements(self) -> list[str]:
        """Proper elements in index order."""
        return [e for t in self.alphabet for e in (t, t + STAR)]

    def index(self, element: str) -> int:
        element = normalize(element)
        try:
            return self._index[element]
        except KeyError:
            raise KeyError(f"unknown element {element!r}") from None

    def name(self, i: int) -> str:
        t = self.alphabet[i >> 1]
        return t + STAR if i & 1 else t

    def __contains__(self, element: str) -> bool:
        element = normalize(element)
        return element in self._index or element in (ZERO, ONE)

    def mask_of(self, elements: Iterable[str]) -> int:
        m = 0
        for e in elements:
            m |= 1 << self.index(e)
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.name(i) for i in range(2 * self.n) if mask >> i & 1)

    def up_mask(self, i: int) -> int:
        """Bitmask of proper elements strictly above element index ``i``."""
        return self._up[i]

    # -- order queries -------------------------------------------------------

    def lt(self, x: str, y: str) -> bool:
        x, y = normalize(x), normalize(y)
        if x == y:
            return False
        if x == ZERO or y == ONE:
            return True
        if x == ONE or y == ZERO:
            return False
        return bool(self._up[self.index(x)] >> self.index(y) & 1)

    def leq(self, x: str, y: str) -> bool:
        return normalize(x) == normalize(y) or self.lt(x, y)

    def up_set(self, element: str) -> frozenset[str]:
        """All proper b with b >= element (element included)."""
        i = self.index(element)
        return self.names(self._up[i] | 1 << i)

    def covers(self) -> list[tuple[str, str]]:
        """Covering pairs ``(x, y)``: x < y with nothing strictly between."""
        out = []
        for i in range(2 * self.n):
            above = self._up[i]
            for j in range(2 * self.n):
                if above >> j & 1:
                    between = above & ~(1 << j)
                    if not any(between >> k & 1 and self._up[k] >> j & 1 for k in range(2 * self.n)):
                        out.append((self.name(i), self.name(j)))
        return out

    def generators(self) -> list[tuple[str, str]]:
        """Covering pairs, one representative per complement-symmetric pair."""
        seen = set()
        out = []
        for x, y in self.covers():
            if (neg(y), neg(x)) in seen:
                continue
            seen.add((x, y))
            out.append((x, y))
        return out

    def __str__(self):
        rel = ", ".join(f"{x}<{y}" for x, y in self.generators())
        return f"PocSet({{{', '.join(self.alphabet)}}}; {rel})"


@dataclass(frozen=True)
class PairRelation:
    """How two proper elements from different tags relate.

    ``relation`` is the strict relation ``(x, y)`` meaning x < y, where x is a
    or a* and y is b or b*; ``None`` means the pair is transverse.
    """

    a: str
    b: str
    relation: tuple[str, str] | None

    @property
    def nested(self) -> bool:
        return self.relation is not None

    @property
    def transverse(self) -> bool:
        return self.relation is None

    def __str__(self):
        if self.relation is None:
            return f"{self.a} ⋔ {self.b}"
        return f"{self.relation[0]} < {self.relation[1]}"


def validate(p: PocSet) -> list[str]:
    """Check the poc-set axioms; return a list of violations (empty if ok)."""
    problems = []
    m = 2 * p.n
    for i in range(m):
        a = p.name(i)
        if p._up[i] >> i & 1:
            problems.append(f"irreflexivity: {a} < {a}")
        if p._up[i] >> (i ^ 1) & 1:
            problems.append(f"{a} ≤ {neg(a)} with {a} proper")
        for j in range(m):
            if not p._up[i] >> j & 1:
                continue
            b = p.name(j)
            if not p._up[j ^ 1] >> (i ^ 1) & 1:
                problems.append(f"involution: {a} < {b} but not {neg(b)} < {neg(a)}")
            if i != j and p._up[j] >> i & 1:
                problems.append(f"antisymmetry: {a} < {b} and {b} < {a}")
            missing = p._up[j] & ~p._up[i]
            for k in range(m):
                if missing >> k & 1:
                    problems.append(f"transitivity: {a} < {b} < {p.name(k)} but not {a} < {p.name(k)}")
    return problems


def is_valid(p: PocSet) -> bool:
    return not validate(p)


def classify_pair(p: PocSet, a: str, b: str) -> PairRelation:
    a, b = normalize(a), normalize(b)
    if is_trivial(a) or is_trivial(b):
        raise ValueError("classify_pair needs proper elements")
    if a not in p._index or b not in p._index:
        raise KeyError(f"unknown element in ({a}, {b})")
    if b in (a, neg(a)):
        raise ValueError(f"{a} and {b} come from the same tag")
    for x in (a, neg(a)):
        for y in (b, neg(b)):
            if p.lt(x, y):
                return PairRelation(a, b, (x, y))
    return PairRelation(a, b, None)


def is_nested_with_all(p: PocSet, a: str) -> bool:
    t = tag_of(a)
    return all(classify_pair(p, a, s).nested for s in p.alphabet if s != t)


def closure_masks(n: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    """Involution- and transitivity-closed strict-order bitmasks on 2n elements.

    May contain cycles or ``x < x*``; callers decide what that means.
    """
    up = [0] * (2 * n)
    for i, j in pairs:
        up[i] |= 1 << j
        up[j ^ 1] |= 1 << (i ^ 1)
    return _transitive_closure(up)


def _parse_relations(alphabet: tuple[str, ...], relations) -> tuple[list[tuple[int, int]], list[str]]:
    index = {}
    for k, t in enumerate(alphabet):
        index[t] = 2 * k
        index[t + STAR] = 2 * k + 1
    pairs, forced_trivial = [], []
    for rel in relations:
        x, y = (normalize(e) for e in rel)
        for e in (x, y):
            if e not in index and e not in (ZERO, ONE):
                raise PocSetError(f"relation {x}<{y} mentions unknown element {e!r}")
        if x == ZERO or y == ONE:
            continue
        if x == ONE or y == ZERO:
            forced_trivial.append(f"{x} < {y} forces a proper element to be trivial")
            continue
        pairs.append((index[x], index[y]))
    return pairs, forced_trivial


def close_order(alphabet: Iterable[str], relations: Iterable[tuple[str, str]] = ()) -> PocSet:
    """Smallest poc-set on ``alphabet`` containing the declared relations ``x < y``.

    Raises :class:`ClosureError` if the closure forces ``a <= a*`` for a proper
    ``a`` or identifies two distinct elements.
    """
    alphabet = tuple(alphabet)
    for t in alphabet:
        _check_tag(t)
    if len(set(alphabet)) != len(alphabet):
        raise PocSetError("duplicate tags in alphabet")
    pairs, errors = _parse_relations(alphabet, relations)
    if errors:
        raise ClosureError("; ".join(errors))
    up = closure_masks(len(alphabet), pairs)
    probe = PocSet(alphabet)
    name = probe.name
    for i in range(len(up)):
        if up[i] >> (i ^ 1) & 1:
            errors.append(f"{name(i)} ≤ {neg(name(i))} with {name(i)} proper")
        elif up[i] >> i & 1:
            eq = [name(j) for j in range(len(up)) if j != i and up[i] >> j & 1 and up[j] >> i & 1]
            errors.append(f"closure forces {name(i)} = {eq[0]}" if eq else f"cycle through {name(i)}")
    if errors:
        raise ClosureError("; ".join(dict.fromkeys(errors)))
    order = frozenset(
        (name(i), name(j)) for i in range(len(up)) for j in range(len(up)) if up[i] >> j & 1
    )
    return PocSet(alphabet, order)


def relation_table(p: PocSet) -> list[PairRelation]:
    return [classify_pair(p, s, t) for s, t in combinations(p.alphabet, 2)]


# -- morphisms ----------------------------------------------------------------


def morphism_violations(source: PocSet, target: PocSet, mapping: Mapping[str, str]) -> list[str]:
    """Reasons why ``mapping`` (tag -> element of target) is not a poc-morphism."""
    problems = []
    if set(mapping) != set(source.alphabet):
        problems.append("mapping keys must be exactly the source alphabet")
        return problems
    for t, e in mapping.items():
        if normalize(e) not in target:
            problems.append(f"{t} ↦ {e}: not an element of the target")
    if problems:
        return problems

    def img(x: str) -> str:
        return normalize(mapping[x]) if not x.endswith(STAR) else neg(mapping[x[:-1]])

    for x, y in sorted(source.order):
        if not target.leq(img(x), img(y)):
            problems.append(f"order: {x} < {y} but {img(x)} ≰ {img(y)}")
    return problems


@dataclass(frozen=True)
class PocMorphism:
    """A poc-morphism given by the images of the source tags.

    Images may be any element of the target, trivial ones included; the map
    is extended by f(0) = 0 and f(a*) = f(a)*.
    """

    source: PocSet
    target: PocSet
    mapping: tuple[tuple[str, str], ...]

    def __init__(self, source: PocSet, target: PocSet, mapping: Mapping[str, str]):
        mapping = {t: normalize(e) for t, e in dict(mapping).items()}
        problems = morphism_violations(source, target, mapping)
        if problems:
            raise MorphismError("; ".join(problems))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "mapping", tuple((t, mapping[t]) for t in source.alphabet))

    @classmethod
    def identity(cls, p: PocSet) -> "PocMorphism":
        return cls(p, p, {t: t for t in p.alphabet})

    def __call__(self, element: str) -> str:
        element = normalize(element)
        if element in (ZERO, ONE):
            return element
        image = dict(self.mapping)[tag_of(element)]
        return neg(image) if element.endswith(STAR) else image

    def image(self) -> frozenset[str]:
        out = {ZERO, ONE}
        for _, e in self.mapping:
            out.update((e, neg(e)))
        return frozenset(out)

    def is_injective(self) -> bool:
        images = [self(e) for e in [ZERO, ONE, *self.source.elements()]]
        return len(set(images)) == len(images)

    def is_surjective(self) -> bool:
        return self.image() == frozenset([ZERO, ONE, *self.target.elements()])

    def is_embedding(self) -> bool:
        """Isomorphism onto the image: injective and order-reflecting."""
        if not self.is_injective():
            return False
        els = [ZERO, ONE, *self.source.elements()]
        return all(
            self.source.leq(x, y) == self.target.leq(self(x), self(y)) for x in els for y in els
        )


def compose(f: PocMorphism, g: PocMorphism) -> PocMorphism:
    """The composite g∘f (apply f, then g)."""
    if f.target != g.source:
        raise MorphismError("compose: target of f differs from source of g")
    return PocMorphism(f.source, g.target, {t: g(e) for t, e in f.mapping})
