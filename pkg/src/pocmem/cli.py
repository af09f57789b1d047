"""Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 I/O or parse error, 3 size guard.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import catalog
from .deformation import DeformationError, degenerate, expand
from .io import pocset_from_json, pocset_to_json
from .median import SizeGuardError, build_dual
from .pocset import PocSetError, relation_table, validate
from .simulate import ScenarioError, run, scenario

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_SIZE = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _builtin(name: str):
    kind, _, arg = name.partition(":")
    if kind == "compass" and not arg:
        return catalog.compass()
    if kind in ("cube", "pompom", "chain") and arg.isdigit():
        return getattr(catalog, kind)(int(arg))
    if kind == "grid" and "," in arg:
        m, n = arg.split(",")
        return catalog.grid(int(m), int(n))
    return None


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_IO, f"{path}: parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _load_pocset(path: str):
    if not os.path.exists(path):
        p = _builtin(path)
        if p is not None:
            return p
    data = _read_json(path)
    try:
        return pocset_from_json(data)
    except PocSetError as exc:
        raise _Fail(EXIT_INVALID, f"{path}: invalid poc-set: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc}") from None


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {path}: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def cmd_validate(args) -> int:
    p = _load_pocset(args.file)
    problems = validate(p)
    if problems:
        raise _Fail(EXIT_INVALID, "; ".join(problems))
    lines = [f"ok: {p.n} tags, {len(p.generators())} generating relations"]
    lines += [f"  {rel}" for rel in relation_table(p)]
    _write("\n".join(lines) + "\n", None)
    return EXIT_OK


def cmd_dual(args) -> int:
    p = _load_pocset(args.file)
    try:
        g = build_dual(p, args.max_tags)
    except SizeGuardError as exc:
        raise _Fail(EXIT_SIZE, str(exc)) from None
    _write(g.to_dot() if args.format == "dot" else _dump(g.to_json()), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = _read_json(args.scenario)
    try:
        res = run(spec, seed=args.seed, budget=args.budget, threshold=args.threshold)
    except SizeGuardError as exc:
        raise _Fail(EXIT_SIZE, str(exc)) from None
    except (ScenarioError, PocSetError, KeyError, ValueError) as exc:
        raise _Fail(EXIT_INVALID, f"scenario: {exc}") from None
    _write(res.to_jsonl(), args.trace)
    if args.movelog:
        _write(res.log.to_jsonl(), args.movelog)
    return EXIT_OK if res.records[-1]["audit"]["ok"] else EXIT_INVALID


def cmd_degenerate(args) -> int:
    q = _load_pocset(args.file)
    try:
        p, r = degenerate(q, args.a, args.b)
    except (DeformationError, KeyError) as exc:
        raise _Fail(EXIT_INVALID, str(exc)) from None
    if p == q:
        print(f"note: corner ({args.a}, {args.b}) is already empty; poc-set unchanged", file=sys.stderr)
    _write(_dump(pocset_to_json(p)), args.out)
    if args.retraction:
        _write(_dump(r.to_json()), args.retraction)
    return EXIT_OK


def cmd_expand(args) -> int:
    p = _load_pocset(args.file)
    try:
        q, r = expand(p, args.tag, relax=tuple(args.relax) if args.relax else None)
    except (DeformationError, KeyError) as exc:
        raise _Fail(EXIT_INVALID, str(exc)) from None
    _write(_dump(pocset_to_json(q)), args.out)
    if args.retraction:
        _write(_dump(r.to_json()), args.retraction)
    return EXIT_OK


def cmd_scenario_gen(args) -> int:
    kw = {"seed": args.seed or 0, "threshold": args.threshold}
    if args.kind == "compass":
        kw.update(epsilon=args.epsilon, atoms=args.atoms, steps=args.steps)
    elif args.kind == "grid":
        kw.update(m=args.m, n=args.n, steps=args.steps)
    else:
        kw.update(length=args.length, steps=args.steps or args.length, budget=args.budget or 1)
    _write(_dump(scenario(args.kind, **kw)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pocmem", description="Poc-sets, median graphs and observer memory.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a poc-set file and print its pair relations")
    v.add_argument("file", help="poc-set JSON, or a builtin such as compass, cube:3, pompom:3, grid:3,4")
    v.set_defaults(func=cmd_validate)

    d = sub.add_parser("dual", help="export the dual median graph")
    d.add_argument("file")
    d.add_argument("--format", choices=["dot", "json"], default="dot")
    d.add_argument("--max-tags", type=int, default=None, help="size guard (default $POCMEM_MAX_TAGS or 20)")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dual)

    s = sub.add_parser("simulate", help="run an observation stream and emit a JSON-lines trace")
    s.add_argument("scenario")
    s.add_argument("--seed", type=int)
    s.add_argument("--budget", help="hop budget k, 'inf', or charge:DECAY,THRESHOLD")
    s.add_argument("--threshold", type=float, help="degenerate corners below this probability")
    s.add_argument("--trace", help="write the trace here instead of stdout")
    s.add_argument("--movelog", help="also write the move log (JSON lines)")
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("degenerate", help="collapse the corner V(a, b)")
    g.add_argument("file")
    g.add_argument("a")
    g.add_argument("b")
    g.add_argument("--out")
    g.add_argument("--retraction")
    g.set_defaults(func=cmd_degenerate)

    e = sub.add_parser("expand", help="add a tag or relax a covering relation")
    e.add_argument("file")
    grp = e.add_mutually_exclusive_group(required=True)
    grp.add_argument("--tag")
    grp.add_argument("--relax", nargs=2, metavar=("X", "Y"))
    e.add_argument("--out")
    e.add_argument("--retraction")
    e.set_defaults(func=cmd_expand)

    c = sub.add_parser("scenario-gen", help="write a ready-made scenario")
    c.add_argument("kind", choices=["compass", "grid", "chain"])
    c.add_argument("--epsilon", type=float, default=60)
    c.add_argument("--atoms", type=int, default=360)
    c.add_argument("--m", type=int, default=3)
    c.add_argument("--n", type=int, default=4)
    c.add_argument("--length", type=int, default=3)
    c.add_argument("--steps", type=int, default=None)
    c.add_argument("--seed", type=int)
    c.add_argument("--budget")
    c.add_argument("--threshold", type=float)
    c.add_argument("--out")
    c.set_defaults(func=cmd_scenario_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "steps", 0) is None and args.command == "scenario-gen" and args.kind != "chain":
        args.steps = 20
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
