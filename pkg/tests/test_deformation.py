import itertools
import json
import warnings
from fractions import Fraction

import numpy as np
import pytest

from pocmem import catalog
from pocmem.deformation import (
    DeformationError,
    DeformationMove,
    MoveLog,
    Retraction,
    apply_degeneration,
    apply_expansion,
    audit_postulate,
    corners,
    degenerate,
    degeneration_candidates,
    expand,
    pullback_weights,
    transport_weights,
)
from pocmem.median import build_dual, corner
from pocmem.observer import Observer
from pocmem.pocset import PocMorphism, close_order, compose, morphism_violations, neg
from pocmem.realization import compass

from oracles import all_pocsets


def corner_pairs(p):
    for s, t in itertools.combinations(p.alphabet, 2):
        for a, b in ((s, t), (s, t + "*"), (s + "*", t), (s + "*", t + "*")):
            yield a, b


def test_square_degenerates_to_path():
    p, r = degenerate(catalog.cube(2), "a1", "a2*")
    assert p.lt("a1", "a2") and r.merges() == {}
    assert dict(r.morphism.mapping) == {"a1": "a1", "a2": "a2"}


def test_empty_corner_is_identity():
    q = catalog.compass()
    p, r = degenerate(q, "n", "s")
    assert p == q and r == Retraction.identity(q)


def test_degeneration_that_merges_tags():
    p, r = degenerate(catalog.chain(2), "b1*", "b2")
    assert p.alphabet == ("b1",)
    assert r.merges() == {"b2": "b1"}
    assert len(build_dual(p).vertices) == 2


def test_degeneration_errors():
    with pytest.raises(DeformationError):
        degenerate(catalog.chain(2), "b1", "b2")  # would force b1 <= b1*
    with pytest.raises(DeformationError):
        degenerate(catalog.cube(2), "a1", "a1*")
    with pytest.raises(DeformationError):
        degenerate(catalog.cube(2), "0", "a1")
    with pytest.raises(KeyError):
        degenerate(catalog.cube(2), "a1", "zz")


def test_degeneration_removes_exactly_the_corner():
    for q in [p for n in (2, 3) for p in all_pocsets(n)]:
        gq = build_dual(q)
        for a, b in corner_pairs(q):
            try:
                p, r = degenerate(q, a, b)
            except DeformationError:
                # fails exactly when collapsing the corner would empty a halfspace
                c = corner(gq, a, b).vertices
                assert any(gq.halfspace(x) <= c for x in q.elements())
                continue
            c = corner(gq, a, b).vertices
            assert not any(gq.halfspace(x) <= c for x in q.elements())
            assert not morphism_violations(q, p, dict(r.morphism.mapping))
            dual = r.dual()
            image = set(dual.values())
            assert len(image) == len(dual)
            assert image == set(gq.vertices) - corner(gq, a, b).vertices
            assert p.leq(r.morphism(a), neg(r.morphism(b)))


def test_expand_fresh_tag():
    p = catalog.chain(2)
    q, r = expand(p, "z")
    assert q.alphabet == ("b1", "b2", "z") and q.order == p.order
    assert r.merges() == {"z": "0"}
    assert len(build_dual(q).vertices) == 2 * len(build_dual(p).vertices)
    with pytest.raises(DeformationError):
        expand(p, "b1")
    with pytest.raises(DeformationError):
        expand(p)
    with pytest.raises(DeformationError):
        expand(p, "z", relax=("b1", "b2"))


def test_expand_relax():
    q, r = expand(catalog.chain(3), relax=("b1", "b2"))
    assert q == close_order(["b1", "b2", "b3"], [("b2", "b3")])
    with pytest.raises(DeformationError):
        expand(catalog.chain(3), relax=("b1", "b3"))  # implied, not covering
    with pytest.raises(DeformationError):
        expand(catalog.chain(3), relax=("b2", "b1"))


def test_degenerate_then_relax_roundtrip():
    q = catalog.cube(3)
    for a, b in corner_pairs(q):
        p, _ = degenerate(q, a, b)
        back, _ = expand(p, relax=(a, neg(b)))
        assert back == q


def test_pullback_identity_on_random_degenerations():
    rng = np.random.Generator(np.random.PCG64(3))
    for q in all_pocsets(3)[::4]:
        for a, b in corner_pairs(q):
            try:
                p, r = degenerate(q, a, b)
            except DeformationError:
                continue
            gp = build_dual(p)
            for _ in range(3):
                w = dict(zip(gp.vertices, rng.dirichlet(np.ones(len(gp.vertices)))))
                back = pullback_weights(r, transport_weights(r, w))
                assert all(abs(back[v] - w[v]) <= 1e-12 for v in gp.vertices)


def test_transport_normalizes_with_warning():
    p, r = degenerate(catalog.cube(2), "a1", "a2*")
    g = build_dual(p)
    with pytest.warns(UserWarning):
        out = transport_weights(r, {v: 2 for v in g.vertices})
    assert sum(out.values()) == 1
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transport_weights(r, {v: Fraction(1, 3) for v in g.vertices})
    with pytest.raises(DeformationError):
        transport_weights(r, {v: 0 for v in g.vertices})


def test_retraction_checks():
    q = catalog.cube(2)
    p = close_order(["a1"])
    with pytest.raises(DeformationError):
        Retraction(PocMorphism(q, p, {"a1": "a1*", "a2": "0"}))
    with pytest.raises(DeformationError):
        Retraction(PocMorphism(p, close_order(["b"]), {"a1": "b"}))


def test_corners_and_candidates():
    r = compass(30)
    o = Observer.objective(r)
    assert len(corners(o.graph)) == 22  # 24 corners less the empty (n, s) and (w, e)
    cands = degeneration_candidates(o, 0.1)
    assert [(c.a, c.b) for c in cands] == [("n", "w"), ("n", "e"), ("s", "w"), ("s", "e")]
    assert degeneration_candidates(o, 1.0)[0].a == "n"
    with pytest.raises(ValueError):
        degeneration_candidates(o, 0)


def test_apply_degeneration_keeps_consistent_world():
    r = compass(30)
    o = Observer.objective(r, 0)
    o2, move = apply_degeneration(o, "n", "w")
    assert o2.realization is not None and o2.pocset.lt("n", "w*")
    assert o2.epsilon == o.epsilon
    assert sum(o2.excitation.values()) == 1
    assert move.transport_summary() == {"massKept": 1.0, "massDiscarded": 0.0}


def test_apply_degeneration_drops_contradicted_world():
    r = compass(60)
    o = Observer.objective(r, 0)
    o2, move = apply_degeneration(o, "n", "w")
    assert o2.realization is None
    assert 0 < move.transport_summary()["massDiscarded"] < 1


def test_apply_degeneration_needs_mass_outside_corner():
    p = catalog.cube(2)
    g = build_dual(p)
    o = Observer(p, {g.vertex({"a1", "a2"}): 1})
    with pytest.raises(DeformationError):
        apply_degeneration(o, "a1", "a2")


def test_apply_expansion():
    o = Observer.uniform(catalog.chain(2), {"b1"})
    o2, move = apply_expansion(o, "z")
    assert o2.epsilon == {"b1"} and move.delta == {"tag": "z"}
    g2 = o2.graph
    assert sum(o2.excitation[v] for v in g2.halfspace("z")) == 0
    o3, move = apply_expansion(o, relax=("b1", "b2"))
    assert len(o3.graph.vertices) == 4 and move.delta == {"relax": ["b1", "b2"]}


def _history():
    o = Observer.objective(compass(30), 0)
    log = MoveLog.start(o)
    cur = o
    for a, b in [("n", "w"), ("s", "e")]:
        cur, move = apply_degeneration(cur, a, b)
        log.append(move, cur)
    cur, move = apply_expansion(cur, "z")
    log.append(move, cur)
    cur, move = apply_expansion(cur, relax=("n", "w*"))
    log.append(move, cur)
    return log


def test_audit_accepts_elementary_moves():
    assert audit_postulate(_history()) == (True, None)


def test_movelog_jsonl_roundtrip():
    log = _history()
    text = log.to_jsonl()
    assert len(text.splitlines()) == 4
    back = MoveLog.from_jsonl(text)
    assert audit_postulate(back) == (True, None)
    assert back.to_jsonl() == text


def test_audit_rejects_tampered_weights():
    text = _history().to_jsonl().splitlines()
    rec = json.loads(text[0])
    weights = rec["after"]["p"]
    k1, k2 = sorted(weights)[:2]
    weights[k1], weights[k2] = "1/2", "0"
    text[0] = json.dumps(rec)
    ok, why = audit_postulate(MoveLog.from_jsonl("\n".join(text)))
    assert not ok and why.startswith("step 0") and "weights" in why


def test_audit_rejects_fused_moves():
    q = catalog.cube(3)
    o = Observer.uniform(q)
    o1, m1 = apply_degeneration(o, "a1", "a2")
    o2, m2 = apply_degeneration(o1, "a1", "a3")
    fused = Retraction(compose(m1.retraction.morphism, m2.retraction.morphism))
    move = DeformationMove("degeneration", fused, {"corner": ["a1", "a2"]}, o.probabilities(), o2.excitation)
    ok, why = audit_postulate(MoveLog([o, o2], [move]))
    assert not ok
    both = DeformationMove("degeneration", fused, {"corner": ["a1", "a2"], "also": ["a1", "a3"]}, {}, {})
    assert audit_postulate(MoveLog([o, o2], [both]))[0] is False


def test_audit_rejects_wrong_corner():
    o = Observer.uniform(catalog.cube(2))
    o1, move = apply_degeneration(o, "a1", "a2")
    wrong = DeformationMove("degeneration", move.retraction, {"corner": ["a1", "a2*"]}, move.before, move.after)
    ok, why = audit_postulate(MoveLog([o, o1], [wrong]))
    assert not ok and "single-corner" in why


def test_audit_needs_a_log():
    with pytest.raises(ValueError):
        audit_postulate(MoveLog.start(Observer.uniform(catalog.cube(1))))
    with pytest.raises(ValueError):
        MoveLog([Observer.uniform(catalog.cube(1))] * 2, [])
