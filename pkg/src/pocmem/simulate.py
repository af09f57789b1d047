"""Observation-stream simulation producing a JSON-lines trace.

A scenario is a JSON object::

    {
      "world": {"compass": {"epsilon": 60, "atoms": 360}}   # or {"grid": {"m": 3, "n": 4}},
                                                           # or {"realization": {...}}, or absent
      "pocset": {...},                 # required unless the world generates one
      "observer": {"epsilon": [...], "atom": 0, "p": "objective" | "uniform" | {index: weight}},
      "stream": ["n", "s"] | {"sample": 100},
      "seed": 0,
      "mode": "idealized" | "dissipative",
      "budget": "1" | "inf" | "charge:0.5,0.1",
      "threshold": 0.01,               # optional: degenerate corners below this probability
      "misperception": false
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import realization as rz
from .deformation import (
    DeformationError,
    MoveLog,
    apply_degeneration,
    audit_postulate,
    degeneration_candidates,
)
from .io import observer_to_json, pocset_from_json, weights_from_json
from .observer import (
    IDEALIZED,
    Observer,
    misperception_report,
    parse_budget,
    update_dissipative,
    update_idealized,
)
from .median import build_dual
from .pocset import is_trivial, normalize
from . import catalog


class ScenarioError(ValueError):
    """The scenario refers to things that do not exist or do not fit."""


@dataclass
class SimulationResult:
    records: list[dict] = field(default_factory=list)
    observer: Observer | None = None
    log: MoveLog | None = None

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in self.records)


def _world(spec: Mapping) -> tuple[Any, rz.Realization | None]:
    world = spec.get("world")
    if not world:
        if "pocset" not in spec:
            raise ScenarioError("scenario needs a world or a pocset")
        return pocset_from_json(spec["pocset"]), None
    if "compass" in world:
        c = world["compass"]
        r = rz.compass(float(c["epsilon"]), int(c.get("atoms", 360)))
    elif "grid" in world:
        r = rz.grid(int(world["grid"]["m"]), int(world["grid"]["n"]))
    elif "realization" in world:
        if "pocset" not in spec:
            raise ScenarioError("an inline realization needs the scenario's pocset")
        r = rz.from_json(world["realization"], pocset_from_json(spec["pocset"]))
    else:
        raise ScenarioError(f"unknown world {sorted(world)}")
    return r.pocset, r


def _initial_observer(spec: Mapping, pocset, r) -> Observer:
    ospec = spec.get("observer", {})
    g = build_dual(pocset)
    pspec = ospec.get("p", "objective" if r is not None else "uniform")
    if pspec == "objective":
        if r is None:
            raise ScenarioError("objective weights need a world")
        o = Observer.objective(r)
    elif pspec == "uniform":
        o = Observer(pocset, Observer.uniform(pocset).excitation, frozenset(), r)
    else:
        o = Observer(pocset, weights_from_json(g.vertices, pspec), frozenset(), r)
    if "atom" in ospec and r is not None and "epsilon" not in ospec:
        return o.with_epsilon(rz.pi_x(r, int(ospec["atom"])))
    try:
        return o.with_epsilon(ospec.get("epsilon", []))
    except KeyError as exc:
        raise ScenarioError(f"epsilon: {exc}") from None


def run(spec: Mapping, seed: int | None = None, budget: str | None = None, threshold: float | None = None) -> SimulationResult:
    seed = int(spec.get("seed", 0) if seed is None else seed)
    if budget is not None:
        spec = {**spec, "mode": "dissipative", "budget": budget}
    if threshold is not None:
        spec = {**spec, "threshold": threshold}
    th = spec.get("threshold")
    if th is not None and not 0 < float(th) < 1:
        raise ScenarioError("threshold must lie in (0, 1)")
    mode = spec.get("mode", "idealized")
    if mode not in ("idealized", "dissipative"):
        raise ScenarioError(f"unknown mode {mode!r}")
    prop = parse_budget(str(spec.get("budget", "inf"))) if mode == "dissipative" else IDEALIZED

    pocset, r = _world(spec)
    o = _initial_observer(spec, pocset, r)
    rng = np.random.Generator(np.random.PCG64(seed))
    stream = spec.get("stream", [])
    if isinstance(stream, Mapping):
        if r is None:
            raise ScenarioError("sampled streams need a world")
        steps = int(stream["sample"])
        explicit = None
    else:
        steps = len(stream)
        explicit = [normalize(e) for e in stream]
        for e in explicit:
            if e not in pocset or is_trivial(e):
                raise ScenarioError(f"stream element {e!r} is not a proper element")
    mu = np.array([float(w) for w in r.world.mu]) if r is not None else None
    original = pocset.elements()
    translate = {e: e for e in original}
    fixed_atom = spec.get("observer", {}).get("atom")

    res = SimulationResult()
    res.records.append({
        "type": "header",
        "seed": seed,
        "rng": "numpy.PCG64",
        "mode": mode,
        "budget": str(spec.get("budget", "inf")) if mode == "dissipative" else "inf",
        "threshold": th,
        "initial": observer_to_json(o),
    })
    log = MoveLog.start(o)
    for t in range(steps):
        atom = None
        if explicit is None:
            atom = int(rng.choice(len(mu), p=mu / mu.sum()))
            truth = sorted(rz.pi_x(r, atom), key=pocset.index)
            raw = truth[int(rng.integers(len(truth)))]
        else:
            raw = explicit[t]
            atom = fixed_atom
        current = translate.get(raw)
        rec: dict[str, Any] = {"type": "step", "t": t, "observed": raw}
        if atom is not None:
            rec["atom"] = atom
        if current is None or is_trivial(current):
            rec["skipped"] = "observation became trivial after degeneration"
            res.records.append(rec)
            continue
        rec["mapped"] = current
        if mode == "idealized":
            o, report = update_idealized(o, current)
        else:
            o, report = update_dissipative(o, current, prop)
        rec["report"] = report.to_json()
        rec["epsilon"] = sorted(o.epsilon, key=o.pocset.index)
        if spec.get("misperception") and atom is not None and o.realization is not None:
            rec["misperception"] = misperception_report(o, atom).to_json(o.graph)
        res.records.append(rec)
        if th is not None:
            for c in degeneration_candidates(o, float(th)):
                try:
                    o2, move = apply_degeneration(o, c.a, c.b)
                except DeformationError:
                    continue
                log.append(move, o2)
                for e, cur in translate.items():
                    if cur is not None and not is_trivial(cur):
                        translate[e] = move.retraction.morphism(cur)
                move_rec = json.loads(MoveLog([o, o2], [move]).to_jsonl())
                move_rec.update({"type": "move", "t": t, "step": len(log.moves) - 1})
                res.records.append(move_rec)
                o = o2
                break
    audit = {"ok": True, "violation": None, "moves": len(log.moves)}
    if log.moves:
        ok, why = audit_postulate(log)
        audit = {"ok": ok, "violation": why, "moves": len(log.moves)}
    res.records.append({"type": "final", "observer": observer_to_json(o), "audit": audit})
    res.observer = o
    res.log = log
    return res


def movelog_from_trace(lines: list[str]) -> MoveLog:
    """Rebuild the move log from a trace's ``move`` records."""
    moves = [json.loads(l) for l in lines if l.strip() and json.loads(l).get("type") == "move"]
    moves.sort(key=lambda m: m["step"])
    text = "".join(
        json.dumps({k: m[k] for k in ("step", "kind", "delta", "retraction", "before", "after", "transport")}) + "\n"
        for m in moves
    )
    return MoveLog.from_jsonl(text)


def scenario(kind: str, **kw) -> dict:
    """Ready-made scenarios: ``compass``, ``grid`` and ``chain``."""
    if kind == "compass":
        eps = kw.get("epsilon", 60)
        return {
            "world": {"compass": {"epsilon": eps, "atoms": kw.get("atoms", 360)}},
            "observer": {"p": "objective", "atom": 0},
            "stream": {"sample": kw.get("steps", 20)},
            "seed": kw.get("seed", 0),
            "mode": "idealized",
            "misperception": True,
            **({"threshold": kw["threshold"]} if kw.get("threshold") is not None else {}),
        }
    if kind == "grid":
        return {
            "world": {"grid": {"m": kw.get("m", 3), "n": kw.get("n", 4)}},
            "observer": {"p": "objective", "atom": 0},
            "stream": {"sample": kw.get("steps", 20)},
            "seed": kw.get("seed", 0),
            "mode": "idealized",
            **({"threshold": kw["threshold"]} if kw.get("threshold") is not None else {}),
        }
    if kind == "chain":
        from .io import pocset_to_json

        n = kw.get("length", 3)
        p = catalog.chain(n)
        return {
            "pocset": pocset_to_json(p),
            "observer": {"p": "uniform", "epsilon": [t + "*" for t in p.alphabet]},
            "stream": [p.alphabet[0]] * kw.get("steps", n),
            "seed": kw.get("seed", 0),
            "mode": "dissipative",
            "budget": str(kw.get("budget", 1)),
        }
    raise ScenarioError(f"unknown scenario kind {kind!r}")
