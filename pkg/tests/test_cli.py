import json
import subprocess
import sys
from fractions import Fraction

import pytest

from pocmem import catalog
from pocmem.cli import main
from pocmem.io import (
    decode_weight,
    encode_weight,
    observer_from_json,
    observer_to_json,
    pocset_from_json,
    pocset_to_json,
)
from pocmem.observer import Observer
from pocmem.realization import compass
from pocmem.simulate import ScenarioError, movelog_from_trace, run, scenario


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_validate_builtin_and_file(tmp_path, capsys):
    assert main(["validate", "compass"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("ok: 4 tags, 2 generating relations") and "n < s*" in out
    path = write(tmp_path, "p.json", {"alphabet": ["a", "b"], "relations": [["a", "b∗"]]})
    assert main(["validate", path]) == 0


def test_validate_rejects_a_below_its_complement(tmp_path, capsys):
    path = write(tmp_path, "bad.json", {"alphabet": ["a", "b"], "relations": [["a", "b"], ["b", "a*"]]})
    assert main(["validate", path]) == 1
    assert "a ≤ a*" in capsys.readouterr().err


def test_parse_and_io_errors(tmp_path, capsys):
    assert main(["validate", write(tmp_path, "broken.json", '{"alphabet": [')]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.json")]) == 2
    assert main(["validate", write(tmp_path, "shape.json", {"tags": []})]) == 2
    assert main(["validate", write(tmp_path, "pair.json", {"alphabet": ["a"], "relations": [["a"]]})]) == 2
    assert main(["dual", "compass", "--out", str(tmp_path / "nodir" / "x.dot")]) == 2


def test_size_guard_exit_code(monkeypatch, capsys):
    assert main(["dual", "cube:21"]) == 3
    assert main(["dual", "cube:5", "--max-tags", "4"]) == 3
    monkeypatch.setenv("POCMEM_MAX_TAGS", "2")
    assert main(["dual", "cube:3"]) == 3
    assert "size guard" in capsys.readouterr().err


def test_dual_exports(tmp_path, capsys):
    assert main(["dual", "pompom:3"]) == 0
    dot = capsys.readouterr().out
    assert dot.startswith("graph dual {") and dot.count("--") == 3
    out = tmp_path / "g.json"
    assert main(["dual", "grid:2,3", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["vertices"]) == 12 and len(data["edges"]) == 17


def test_degenerate_and_expand_commands(tmp_path, capsys):
    out, ret = tmp_path / "p.json", tmp_path / "r.json"
    assert main(["degenerate", "cube:2", "a1", "a2*", "--out", str(out), "--retraction", str(ret)]) == 0
    p = pocset_from_json(json.loads(out.read_text()))
    assert p.lt("a1", "a2")
    assert json.loads(ret.read_text())["map"] == {"a1": "a1", "a2": "a2"}
    assert main(["degenerate", "compass", "n", "s"]) == 0
    assert "already empty" in capsys.readouterr().err
    assert main(["degenerate", "chain:2", "b1", "b2"]) == 1
    assert main(["degenerate", "chain:2", "b1", "zz"]) == 1
    assert main(["expand", str(out), "--relax", "a1", "a2"]) == 0
    assert json.loads(capsys.readouterr().out) == {"alphabet": ["a1", "a2"], "relations": []}
    assert main(["expand", "chain:2", "--tag", "z"]) == 0
    assert main(["expand", "chain:3", "--relax", "b1", "b3"]) == 1


def test_scenario_gen_and_simulate(tmp_path, capsys):
    for kind in ("compass", "grid", "chain"):
        path = tmp_path / f"{kind}.json"
        assert main(["scenario-gen", kind, "--steps", "6", "--out", str(path)]) == 0
        trace = tmp_path / f"{kind}.jsonl"
        movelog = tmp_path / f"{kind}.moves.jsonl"
        assert main(["simulate", str(path), "--trace", str(trace), "--movelog", str(movelog)]) == 0
        records = [json.loads(line) for line in trace.read_text().splitlines()]
        assert records[0]["type"] == "header" and records[-1]["type"] == "final"
        assert sum(r["type"] == "step" for r in records) == 6


def test_simulate_budget_override(tmp_path):
    path = write(tmp_path, "chain.json", scenario("chain", length=3, steps=1))
    trace = tmp_path / "t.jsonl"
    assert main(["simulate", path, "--budget", "inf", "--trace", str(trace)]) == 0
    step = json.loads(trace.read_text().splitlines()[1])
    assert step["epsilon"] == ["b1", "b2", "b3"]


def test_simulate_invalid_scenarios(tmp_path):
    assert main(["simulate", write(tmp_path, "a.json", {"stream": ["x"]})]) == 1
    assert main(["simulate", write(tmp_path, "b.json", {"pocset": {"alphabet": ["a"]}, "stream": ["z"]})]) == 1
    good = scenario("compass", steps=2)
    assert main(["simulate", write(tmp_path, "c.json", good), "--threshold", "1.5"]) == 1
    assert main(["simulate", write(tmp_path, "d.json", {**good, "mode": "psychic"})]) == 1
    assert main(["simulate", write(tmp_path, "e.json", "not json")]) == 2


def test_run_api_explicit_stream():
    res = run({"pocset": pocset_to_json(catalog.compass()),
               "observer": {"epsilon": ["n", "s*", "w*", "e*"]}, "stream": ["s", "w"]})
    steps = [r for r in res.records if r["type"] == "step"]
    assert steps[0]["epsilon"] == ["n*", "s", "w*", "e*"]
    assert steps[1]["epsilon"] == ["n*", "s", "w", "e*"]
    assert res.observer.epsilon == {"n*", "s", "w", "e*"}
    with pytest.raises(ScenarioError):
        run({"pocset": pocset_to_json(catalog.compass()), "stream": {"sample": 3}})


def test_observations_translate_through_degenerations():
    spec = scenario("compass", epsilon=30, steps=30, seed=1, threshold=0.05)
    res = run(spec)
    moves = [r for r in res.records if r["type"] == "move"]
    assert moves and res.records[-1]["audit"] == {"ok": True, "violation": None, "moves": len(moves)}
    assert movelog_from_trace(res.to_jsonl().splitlines()).to_jsonl() == res.log.to_jsonl()


def test_weight_encoding():
    assert encode_weight(Fraction(1, 3)) == "1/3" and decode_weight("1/3") == Fraction(1, 3)
    assert encode_weight(Fraction(2)) == 2 and encode_weight(0.25) == 0.25
    o = Observer.objective(compass(30), 0)
    back = observer_from_json(json.loads(json.dumps(observer_to_json(o))))
    assert back.pocset == o.pocset and back.excitation == o.excitation and back.epsilon == o.epsilon


def test_pocset_json_lists_generators():
    data = pocset_to_json(catalog.chain(3))
    assert data == {"alphabet": ["b1", "b2", "b3"], "relations": [["b1", "b2"], ["b2", "b3"]]}
    assert pocset_from_json(data) == catalog.chain(3)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "pocmem.cli", "validate", "cube:2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("ok: 2 tags")
