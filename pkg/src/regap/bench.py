"""CFG-like corpora, benchmark pattern families and the benchmark harness."""

from __future__ import annotations

import csv
import io
import math
import random
import statistics
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional

from .constraints import Compare, Or
from .encode import EncodeOptions, encode
from .graph import CONCRETE, AttributedGraph, ReGaP, WildcardKind
from .match import MATCH, NO_MATCH, match

STATEMENT_KINDS = ("assign", "call", "branch", "loop-head", "return")


@dataclass(frozen=True)
class CorpusConfig:
    median_nodes: int = 21
    spread: float = 0.55  # sigma of the log-normal size distribution
    min_nodes: int = 4
    branch_weight: float = 0.2
    loop_weight: float = 0.18
    max_depth: int = 3


class _Builder:
    def __init__(self, rng: random.Random, cfg: CorpusConfig):
        self.rng, self.cfg = rng, cfg
        self.kinds = {}
        self.edges = set()

    def node(self, kind: str) -> str:
        n = f"n{len(self.kinds)}"
        self.kinds[n] = kind
        return n

    def link(self, tails, head):
        for t in tails:
            self.edges.add((t, head))

    def block(self, budget: int, depth: int):
        """Statements worth about ``budget`` nodes; returns (entry, dangling tails)."""
        rng, cfg = self.rng, self.cfg
        entry, tails = None, []
        while budget > 0:
            r = rng.random()
            if depth < cfg.max_depth and budget >= 4 and r < cfg.branch_weight:
                b = self.node("branch")
                size = rng.randint(1, max(1, budget // 2))
                then_entry, then_tails = self.block(size, depth + 1)
                self.edges.add((b, then_entry))
                if rng.random() < 0.5 and budget - size > 2:
                    alt = rng.randint(1, max(1, (budget - size) // 2))
                    else_entry, else_tails = self.block(alt, depth + 1)
                    self.edges.add((b, else_entry))
                    size += alt
                else:
                    else_tails = [b]
                first, outs, used = b, then_tails + else_tails, size + 1
            elif depth < cfg.max_depth and budget >= 3 and r < cfg.branch_weight + cfg.loop_weight:
                h = self.node("loop-head")
                size = rng.randint(1, max(1, budget // 2))
                body_entry, body_tails = self.block(size, depth + 1)
                self.edges.add((h, body_entry))
                self.link(body_tails, h)
                first, outs, used = h, [h], size + 1
            else:
                n = self.node(rng.choice(("assign", "assign", "call")))
                first, outs, used = n, [n], 1
            if entry is None:
                entry = first
            self.link(tails, first)
            tails = outs
            budget -= used
        return entry, tails


def cfg_graph(rng: random.Random, size: int, cfg: CorpusConfig = CorpusConfig()) -> AttributedGraph:
    """A single-entry control-flow graph of roughly ``size`` nodes ending in a return."""
    b = _Builder(rng, cfg)
    _, tails = b.block(max(1, size - 1), 0)
    ret = b.node("return")
    b.link(tails, ret)
    nodes = tuple(b.kinds)
    return AttributedGraph(nodes, frozenset(b.edges), {n: {"kind": k} for n, k in b.kinds.items()}, {})


def corpus_sizes(rng: random.Random, count: int, cfg: CorpusConfig = CorpusConfig()) -> list:
    return [
        max(cfg.min_nodes, round(rng.lognormvariate(math.log(cfg.median_nodes), cfg.spread)))
        for _ in range(count)
    ]


def generate_corpus(seed: int, count: int, cfg: CorpusConfig = CorpusConfig()) -> list:
    rng = random.Random(seed)
    return [cfg_graph(rng, n, cfg) for n in corpus_sizes(rng, count, cfg)]


def chain_corpus(seed: int, count: int, length: int = 8) -> list:
    """Straight-line functions: maximally mergeable chains with a loop around them."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = length + rng.randint(0, length // 2)
        nodes = [f"n{i}" for i in range(n)]
        kinds = {v: rng.choice(("assign", "call")) for v in nodes}
        kinds[nodes[0]] = "loop-head"
        kinds[nodes[-1]] = "return"
        edges = set(zip(nodes[:-2], nodes[1:-1])) | {(nodes[-2], nodes[0]), (nodes[0], nodes[-1])}
        out.append(AttributedGraph(tuple(nodes), frozenset(edges), {v: {"kind": k} for v, k in kinds.items()}, {}))
    return out


# --- pattern families ---------------------------------------------------------

_FAMILY_KINDS = (
    WildcardKind.SUB0PLUS,
    WildcardKind.SEQ0PLUS,
    WildcardKind.SUB1PLUS,
    WildcardKind.SEQ1PLUS,
    WildcardKind.SUB0PLUS,
)
_STATEMENT = Or((Compare("kind", "eq", "assign"), Compare("kind", "eq", "call")))


def _kind_is(k: str):
    return Compare("kind", "eq", k)


def wildcard_family(count: int) -> ReGaP:
    """W1 -> C1 -> W2 -> ... -> Wcount -> R.

    Each Ci is a straight-line statement (assign or call) that every path
    through the function crosses, and R is the return; the wildcards
    alternate between subgraph and sequence kinds.
    """
    if not 1 <= count <= len(_FAMILY_KINDS):
        raise ValueError(f"family defined for 1..{len(_FAMILY_KINDS)} wildcards")
    kind, node_c, edges = {}, {}, set()
    for i in range(1, count + 1):
        w = f"W{i}"
        kind[w] = _FAMILY_KINDS[i - 1]
        if i > 1:
            edges.add((f"C{i - 1}", w))
        if i < count:
            kind[f"C{i}"] = CONCRETE
            node_c[f"C{i}"] = _STATEMENT
            edges.add((w, f"C{i}"))
    kind["R"] = CONCRETE
    node_c["R"] = _kind_is("return")
    edges.add((f"W{count}", "R"))
    return ReGaP(tuple(kind), kind, frozenset(edges), node_c)


def builtin_patterns() -> dict:
    """Pattern id -> pattern; ``w1``..``w5`` vary the wildcard count."""
    pats = {f"w{k}": wildcard_family(k) for k in range(1, 6)}
    # A wildcard-wildcard edge: node merging must stay off.
    kind = {"W1": WildcardKind.SUB0PLUS, "W2": WildcardKind.SEQ1PLUS, "R": CONCRETE}
    pats["ww"] = ReGaP(("W1", "W2", "R"), kind, frozenset({("W1", "W2"), ("W2", "R")}),
                       {"R": _kind_is("return")})
    # A function that is one loop: a loop head, a straight-line body, then the rest.
    kind = {"L": CONCRETE, "B": WildcardKind.SEQ1PLUS, "W": WildcardKind.SUB0PLUS}
    pats["loop"] = ReGaP(("L", "B", "W"), kind,
                         frozenset({("L", "B"), ("B", "L"), ("L", "W")}),
                         {"L": _kind_is("loop-head")})
    return pats


# --- harness -------------------------------------------------------------------

TIMING_COLUMNS = ("encode_s", "solve_s")
DEFAULT_TIMEOUT = 60.0  # seconds per instance


@dataclass
class BenchRecord:
    instance: str
    nodes: int
    edges: int
    pattern: str
    wildcards: int
    merge: str  # "applied", "off" or "not applied"
    nodes_before: int
    nodes_after: int
    edges_after: int
    vars_before: int
    vars_after: int
    clauses_before: int
    clauses_after: int
    encode_s: float
    solve_s: float
    outcome: str  # SAT, UNSAT, TIMEOUT or ERROR
    error: str = ""


def bench_one(gid: str, g: AttributedGraph, pid: str, p: ReGaP, merge: bool = True,
              timeout: Optional[float] = DEFAULT_TIMEOUT, solver: str = "builtin", k: Optional[int] = None) -> BenchRecord:
    rec = BenchRecord(gid, len(g.nodes), len(g.edges), pid, len(p.wildcards), "off",
                      len(g.nodes), len(g.nodes), len(g.edges), 0, 0, 0, 0, 0.0, 0.0, "ERROR")
    try:
        base = encode(p, g, EncodeOptions(merge=False, k=k))
        rec.vars_before = rec.vars_after = base.formula.num_vars
        rec.clauses_before = rec.clauses_after = len(base.formula.clauses)
        if merge and p.has_wildcard_edge:
            rec.merge = "not applied"
        res = match(p, g, EncodeOptions(merge=merge, k=k), timeout, solver)
        if merge and not p.has_wildcard_edge:
            rec.merge = "applied"
            rec.nodes_after = len(res.encoding.graph.nodes)
            rec.edges_after = len(res.encoding.graph.edges)
            rec.vars_after = res.encoding.formula.num_vars
            rec.clauses_after = len(res.encoding.formula.clauses)
        rec.encode_s = res.timings["encode"]
        rec.solve_s = res.timings["solve"]
        rec.outcome = {MATCH: "SAT", NO_MATCH: "UNSAT"}.get(res.status, "TIMEOUT")
    except Exception as exc:  # recorded, the run goes on
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def run_bench(graphs: Iterable, patterns: dict, merge: bool = True, timeout: Optional[float] = DEFAULT_TIMEOUT,
              solver: str = "builtin", k: Optional[int] = None) -> list:
    """One record per (graph, pattern); ``graphs`` yields (id, graph) pairs."""
    return [
        bench_one(gid, g, pid, p, merge, timeout, solver, k)
        for gid, g in graphs
        for pid, p in patterns.items()
    ]


def records_to_csv(records: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=[f.name for f in fields(BenchRecord)], lineterminator="\n")
    w.writeheader()
    for r in records:
        row = asdict(r)
        for col in TIMING_COLUMNS:
            row[col] = f"{row[col]:.6f}"
        w.writerow(row)
    return buf.getvalue()


def _stats(values: list) -> dict:
    if not values:
        return {"min": None, "max": None, "median": None, "average": None}
    return {"min": min(values), "max": max(values), "median": statistics.median(values),
            "average": round(statistics.fmean(values), 3)}


def summarize(records: list) -> dict:
    """Size table (base vs merged) and a per-pattern outcome table."""
    ok = [r for r in records if r.outcome != "ERROR"]
    sizes = {}
    for label, suffix in (("base", "before"), ("merged", "after")):
        sizes[label] = {
            "nodes": _stats([getattr(r, f"nodes_{suffix}") for r in ok]),
            "edges": _stats([r.edges if suffix == "before" else r.edges_after for r in ok]),
            "vars": _stats([getattr(r, f"vars_{suffix}") for r in ok]),
            "clauses": _stats([getattr(r, f"clauses_{suffix}") for r in ok]),
        }
    applied = [r for r in ok if r.merge == "applied" and r.clauses_before]
    reduction = {
        "nodes": statistics.fmean(1 - r.nodes_after / r.nodes_before for r in applied) if applied else 0.0,
        "clauses": statistics.fmean(1 - r.clauses_after / r.clauses_before for r in applied) if applied else 0.0,
    }
    per_pattern = {}
    for r in records:
        row = per_pattern.setdefault(r.pattern, {"wildcards": r.wildcards, "SAT": 0, "UNSAT": 0,
                                                 "TIMEOUT": 0, "ERROR": 0, "solve_s": []})
        row[r.outcome] += 1
        if r.outcome in ("SAT", "UNSAT"):
            row["solve_s"].append(r.solve_s)
    for row in per_pattern.values():
        times = row.pop("solve_s")
        row["median_solve_s"] = statistics.median(times) if times else None
    return {"sizes": sizes, "mean_reduction": reduction, "patterns": per_pattern}
