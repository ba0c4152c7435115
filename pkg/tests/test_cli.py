import csv
import io
import json
import statistics
import subprocess
import sys
from pathlib import Path

import pytest

from regap import bench
from regap.cli import main
from regap.graph import dumps, load_graph, load_pattern
from regap.sat import from_dimacs

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_match_golden(capsys):
    code, out, _ = run(capsys, "match", DATA / "loop_graph.json", DATA / "loop_pattern.json")
    assert (code, out) == (0, "MATCH\n")
    code, out, _ = run(capsys, "match", DATA / "guarded_chain.json", DATA / "guarded_pattern.json", "--merge", "off")
    assert (code, out) == (0, "MATCH\n")
    code, out, _ = run(capsys, "match", DATA / "guarded_branch.json", DATA / "guarded_pattern.json")
    assert (code, out) == (1, "NO-MATCH\n")


def test_match_witness(capsys):
    code, out, _ = run(capsys, "match", DATA / "loop_graph.json", DATA / "loop_pattern.json", "--witness")
    assert code == 0
    status, doc = out.split("\n", 1)
    assert status == "MATCH"
    w = json.loads(doc)
    assert w["wildcard_contents"]["G"] == ["v6", "v7"]
    assert w["mapping"]["v1"] == "A"


def test_match_timeout(capsys, tmp_path):
    g = bench.chain_corpus(0, 1, length=12)[0]
    (tmp_path / "g.json").write_text(dumps(g))
    (tmp_path / "p.json").write_text(dumps(bench.builtin_patterns()["w3"]))
    code, out, _ = run(capsys, "match", tmp_path / "g.json", tmp_path / "p.json", "--merge", "off",
                       "--timeout", "0.001")
    assert (code, out) == (2, "UNKNOWN\n")


def test_error_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    pat = DATA / "loop_pattern.json"
    assert run(capsys, "match", tmp_path / "missing.json", pat)[0] == 66
    assert run(capsys, "match", bad, pat)[0] == 65
    assert run(capsys, "match")[0] == 64
    assert run(capsys, "match", DATA / "loop_graph.json", pat, "--solver", "magic")[0] == 64
    assert run(capsys, "match", DATA / "loop_graph.json", pat, "--solver", f"external:{tmp_path}/none")[0] == 69
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run(capsys, "encode", DATA / "loop_graph.json", pat, "-o", blocker / "x.cnf")[0] == 73
    assert run(capsys, "gen", "--out", blocker / "dir", "--count", "1")[0] == 73


def test_external_solver(capsys, tmp_path):
    script = tmp_path / "solver.sh"
    script.write_text("#!/bin/sh\necho 's UNSATISFIABLE'\n")
    script.chmod(0o755)
    code, out, _ = run(capsys, "match", DATA / "loop_graph.json", DATA / "loop_pattern.json",
                       "--solver", f"external:{script}")
    assert (code, out) == (1, "NO-MATCH\n")


def test_encode_outputs(capsys, tmp_path):
    args = ["encode", DATA / "loop_graph.json", DATA / "loop_pattern.json"]
    code, first, _ = run(capsys, *args)
    assert code == 0 and first.startswith("p cnf ")
    assert run(capsys, *args)[1] == first
    run(capsys, *args, "-o", tmp_path / "f.cnf", "--varmap", tmp_path / "v.json",
        "--emit-expanded", tmp_path / "e.json")
    f = from_dimacs((tmp_path / "f.cnf").read_bytes())
    assert (tmp_path / "f.cnf").read_text() == first
    vm = json.loads((tmp_path / "v.json").read_text())
    assert {"o", "m", "c"} <= set(vm)
    assert max(vm["c"].values()) <= f.num_vars
    ep = json.loads((tmp_path / "e.json").read_text())
    assert set(ep["wildcards"]) == {"G", "S~"}


def test_merge_command(capsys, tmp_path):
    code, out, _ = run(capsys, "merge", DATA / "guarded_chain.json", DATA / "guarded_pattern.json")
    doc = json.loads(out)
    assert code == 0
    assert doc["report"]["merged_pairs"] == [["v2", "v3"]]
    assert len(load_graph(doc["graph"]).nodes) == 3
    run(capsys, "merge", DATA / "guarded_chain.json", DATA / "guarded_pattern.json", "-o", tmp_path / "m.json")
    assert len(load_graph((tmp_path / "m.json").read_text()).nodes) == 3


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", DATA / "loop_graph.json", DATA / "loop_pattern.json", "--witness")
    assert code == 0 and out.startswith("MATCH\n")
    assert json.loads(out.split("\n", 1)[1])["bijection"]["v7"] == "G"
    assert run(capsys, "oracle", DATA / "guarded_branch.json", DATA / "guarded_pattern.json")[0] == 1
    assert run(capsys, "oracle", DATA / "loop_graph.json", DATA / "loop_pattern.json", "--max-nodes", "3")[0] == 2


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_gen(capsys, tmp_path):
    assert run(capsys, "gen", "--out", tmp_path / "a", "--count", 10, "--seed", 1)[0] == 0
    run(capsys, "gen", "--out", tmp_path / "b", "--count", 10, "--seed", 1)
    a = _files(tmp_path / "a")
    assert len(a) == 10
    assert a == _files(tmp_path / "b")
    sizes = [len(load_graph(b).nodes) for b in a.values()]
    assert 15 <= statistics.median(sizes) <= 27
    kinds = {attrs["kind"] for b in a.values() for attrs in load_graph(b).node_attrs.values()}
    assert kinds <= {"assign", "call", "branch", "loop-head", "return"}
    run(capsys, "gen", "--out", tmp_path / "e", "--count", 0)
    assert _files(tmp_path / "e") == {}
    run(capsys, "gen", "--out", tmp_path / "i", "--count", 3, "--shape", "instances")
    inst = _files(tmp_path / "i")
    assert len(inst) == 6
    load_pattern(inst["i0000.pattern.json"])
    assert run(capsys, "gen", "--out", tmp_path / "x", "--count", -1)[0] == 64


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


HEADER = ("instance,nodes,edges,pattern,wildcards,merge,nodes_before,nodes_after,edges_after,vars_before,"
          "vars_after,clauses_before,clauses_after,encode_s,solve_s,outcome,error\n")


def test_bench_empty_corpus(capsys, tmp_path):
    (tmp_path / "c").mkdir()
    code, out, _ = run(capsys, "bench", "--corpus", tmp_path / "c")
    assert code == 0
    assert out == HEADER


def test_bench_chain_corpus(capsys, tmp_path):
    run(capsys, "gen", "--out", tmp_path / "c", "--count", 3, "--seed", 2, "--shape", "chain")
    code, out, _ = run(capsys, "bench", "--corpus", tmp_path / "c", "--patterns", "w1,ww,loop",
                       "--summary", tmp_path / "s.json")
    rows = _csv(out)
    assert code == 0 and len(rows) == 9
    assert {r["merge"] for r in rows if r["pattern"] == "ww"} == {"not applied"}
    assert {r["merge"] for r in rows if r["pattern"] != "ww"} == {"applied"}
    assert all(int(r["clauses_after"]) <= int(r["clauses_before"]) for r in rows)
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["mean_reduction"]["clauses"] > 0
    assert set(summary["patterns"]) == {"w1", "ww", "loop"}
    _, off, _ = run(capsys, "bench", "--corpus", tmp_path / "c", "--patterns", "w1,ww,loop", "--merge", "off")
    assert [r["outcome"] for r in _csv(off)] == [r["outcome"] for r in rows]
    assert {r["merge"] for r in _csv(off)} == {"off"}


def test_bench_jsonl_and_patterns_dir(capsys, tmp_path):
    run(capsys, "gen", "--out", tmp_path / "c", "--count", 2, "--seed", 3, "--shape", "chain")
    (tmp_path / "p").mkdir()
    (tmp_path / "p" / "mine.json").write_text(dumps(bench.builtin_patterns()["loop"]))
    code, out, _ = run(capsys, "bench", "--corpus", tmp_path / "c", "--patterns", tmp_path / "p", "--jsonl")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(recs) == 2
    assert {r["pattern"] for r in recs} == {"mine"}
    assert {r["outcome"] for r in recs} == {"SAT"}
    assert run(capsys, "bench", "--corpus", tmp_path / "c", "--patterns", "w9")[0] == 64
    assert run(capsys, "bench", "--corpus", tmp_path / "nope")[0] == 66


def test_bench_default_timeout():
    assert bench.DEFAULT_TIMEOUT == 60.0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "regap", "match", str(DATA / "guarded_branch.json"),
                           str(DATA / "guarded_pattern.json")], capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stdout == "NO-MATCH\n"
