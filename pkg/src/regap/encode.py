"""CNF encoding of ReGaP matching and decoding of models into witnesses.

Variable families, numbered contiguously in this order:

* ``o[x]``    expanded node x is part of the match,
* ``m[x, v]`` expanded node x is mapped to graph node v,
* ``c[key]``  expanded edge ``key`` is realised by a graph edge,
* auxiliaries: ``sink[w]`` / ``source[w]`` mark an empty any-0+ wildcard
  that is realised as a dangling placeholder after (before) its
  neighbours, followed by helper variables of at-most-one ladders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .constraints import eval_node_constraint, eval_pair_constraint
from .expand import ExpandedPattern, expand
from .graph import CONCRETE, AttributedGraph, ReGaP, WildcardKind
from .preprocess import MergeReport, merge_fixpoint
from .sat import CnfFormula, amo

MAX_VARS = 2**31 - 1


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class EncodeOptions:
    merge: bool = True
    k: Optional[int] = None
    amo_strategy: str = "auto"
    pin_copies: bool = False  # map subgraph copy w@v only to v


@dataclass
class VarMap:
    o: dict = field(default_factory=dict)
    m: dict = field(default_factory=dict)
    c: dict = field(default_factory=dict)
    sink: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)
    aux: list = field(default_factory=list)
    num_vars: int = 0

    def fresh(self) -> int:
        self.num_vars += 1
        self.aux.append(self.num_vars)
        return self.num_vars

    @property
    def core_count(self) -> int:
        return len(self.o) + len(self.m) + len(self.c)

    def to_dict(self) -> dict:
        return {
            "o": dict(self.o),
            "m": {f"{x}|{v}": var for (x, v), var in self.m.items()},
            "c": dict(self.c),
            "sink": dict(self.sink),
            "source": dict(self.source),
            "aux": list(self.aux),
        }


# --- structural helpers --------------------------------------------------------


def _zero_plus(p: ReGaP, n) -> bool:
    k = p.kind[n]
    return k != CONCRETE and k.allows_empty


def placeholder_candidates(p: ReGaP):
    """Any-0+ wildcards that could be realised as sink (resp. source) placeholders.

    A sink placeholder hangs below nodes whose only successor it is, and has
    at most one successor, itself a sink placeholder. Sources mirror this.
    """

    def fix(fwd, back):
        cand = {
            w
            for w in p.nodes
            if _zero_plus(p, w)
            and back(w)
            and all(len(fwd(q)) == 1 for q in back(w))
            and len(fwd(w)) <= 1
            # only placeholders without a continuation get merged
            and (not fwd(w) or len(back(w)) == 1)
        }
        changed = True
        while changed:
            changed = False
            for w in sorted(cand):
                if any(s not in cand for s in fwd(w)) or not _chain_ends(w, fwd):
                    cand.discard(w)
                    changed = True
        return cand

    sinks = fix(p.successors, p.predecessors)
    sources = fix(p.predecessors, p.successors)
    return sinks, sources


def _chain_ends(w, fwd) -> bool:
    """Placeholders only ever grow as chains, so a cycle cannot dangle."""
    seen = set()
    while fwd(w):
        if w in seen or len(fwd(w)) > 1:
            return False
        seen.add(w)
        (w,) = fwd(w)
    return True


def allocate_vars(ep: ExpandedPattern, g: AttributedGraph) -> VarMap:
    total = len(ep.nodes) * (1 + len(g.nodes)) + len(ep.edges)
    if total > MAX_VARS:
        raise EncodingError(f"encoding would need {total} variables")
    vm = VarMap()
    for x in ep.nodes:
        vm.num_vars += 1
        vm.o[x] = vm.num_vars
    for x in ep.nodes:
        for v in g.nodes:
            vm.num_vars += 1
            vm.m[(x, v)] = vm.num_vars
    for e in ep.edges:
        vm.num_vars += 1
        vm.c[e.key] = vm.num_vars
    sinks, sources = placeholder_candidates(ep.pattern)
    for w in sorted(sinks):
        vm.num_vars += 1
        vm.sink[w] = vm.num_vars
    for w in sorted(sources):
        vm.num_vars += 1
        vm.source[w] = vm.num_vars
    return vm


class _Context:
    """Shared state for the clause emitters: cached constraint evaluations."""

    def __init__(self, ep: ExpandedPattern, g: AttributedGraph, vm: VarMap, options: EncodeOptions):
        self.ep, self.g, self.vm, self.options = ep, g, vm, options
        self.live = {}
        for x in ep.nodes:
            c = ep.node_constraint(x)
            ok = [v for v in g.nodes if eval_node_constraint(c, g.node_attrs[v])]
            if options.pin_copies and x in ep.copy_of:
                ok = [v for v in ok if v == ep.copy_of[x]]
            self.live[x] = ok
        self.live_at = {v: [x for x in ep.nodes if v in self.live[x]] for v in g.nodes}
        self._accept = {}

    def accepts(self, e, edge) -> bool:
        key = (e.key, edge)
        if key not in self._accept:
            self._accept[key] = self.ep.edge_accepts(e, self.g.edge_attrs[edge])
        return self._accept[key]

    def amo(self, lits):
        return amo(lits, self.options.amo_strategy, self.vm.fresh)

    def present(self, w) -> list:
        """Literals whose disjunction says wildcard w is non-empty."""
        ep, vm = self.ep, self.vm
        if ep.pattern.kind[w].is_sequence:
            return [vm.o[ep.exp_nodes[w][0]]]
        return [vm.o[x] for x in ep.exp_nodes[w]]


# --- clause families ------------------------------------------------------------


def emit_base(ctx: _Context) -> list:
    """Inclusion/mapping consistency, one-to-one mapping and edge preservation."""
    ep, g, vm = ctx.ep, ctx.g, ctx.vm
    out = []
    for x in ep.nodes:
        out.append([-vm.o[x]] + [vm.m[(x, v)] for v in g.nodes])
        out.extend([[-vm.m[(x, v)], vm.o[x]] for v in g.nodes])
    for x in ep.nodes:
        out.extend(ctx.amo([vm.m[(x, v)] for v in g.nodes]))
    for v in g.nodes:
        out.extend(ctx.amo([vm.m[(x, v)] for x in ep.nodes]))
    # Every graph node is covered and every concrete node used.
    for v in g.nodes:
        out.append([vm.m[(x, v)] for x in ep.nodes])
    for x in ep.concrete:
        out.append([vm.o[x]])
    # A realised key sits on included nodes and on an accepting graph edge.
    for e in ep.edges:
        ce = vm.c[e.key]
        out.append([-ce, vm.o[e.src]])
        out.append([-ce, vm.o[e.dst]])
        for u in ctx.live[e.src]:
            targets = [
                vm.m[(e.dst, v)]
                for v in sorted(g.successors(u))
                if v in ctx.live[e.dst] and (e.src == e.dst) == (u == v) and ctx.accepts(e, (u, v))
            ]
            out.append([-ce, -vm.m[(e.src, u)]] + targets)
    # Direct edges between concrete nodes are always realised.
    for e in ep.edges:
        if len(e.path) == 2 and all(ep.pattern.kind[n] == CONCRETE for n in e.path):
            out.append([vm.c[e.key]])
    # Every graph edge between matched nodes realises exactly one key.
    for u, v in g.sorted_edges():
        for x in ctx.live_at[u]:
            for y in ctx.live_at[v]:
                if (x == y) != (u == v):
                    continue
                keys = ep.edges_between(x, y)
                ok = [vm.c[e.key] for e in keys if ctx.accepts(e, (u, v))]
                out.append([-vm.m[(x, u)], -vm.m[(y, v)]] + ok)
    for x in ep.nodes:
        for y in ep.nodes:
            keys = ep.edges_between(x, y)
            if len(keys) > 1:
                out.extend(ctx.amo([vm.c[e.key] for e in keys]))
    return out


def emit_sequence(ctx: _Context) -> list:
    """Slots fill front to back along graph edges; only the last slot has exits."""
    ep, vm = ctx.ep, ctx.vm
    out = []
    for w in ep.pattern.wildcards:
        if not ep.pattern.kind[w].is_sequence:
            continue
        slots = ep.exp_nodes[w]
        for prev, nxt in zip(slots, slots[1:]):
            out.append([-vm.o[nxt], vm.o[prev]])
            for e in ep.edges_between(prev, nxt):
                if e.owner == w:
                    out.append([-vm.o[nxt], vm.c[e.key]])
            for e in ep.edges:
                if e.src == prev and e.owner != w:
                    out.append([-vm.o[nxt], -vm.c[e.key]])
    return out


def emit_subgraph(ctx: _Context) -> list:
    """Any-1+ subgraphs are non-empty; a single absorbed node keeps its self-loop."""
    ep, vm = ctx.ep, ctx.vm
    out = [
        ctx.present(w)
        for w in ep.pattern.wildcards
        if ep.pattern.kind[w] == WildcardKind.SUB1PLUS
    ]
    loops = [v for v in ctx.g.nodes if (v, v) in ctx.g.edges]
    for w in ep.pattern.wildcards:
        if ep.pattern.kind[w].is_sequence:
            continue
        for x in ep.exp_nodes[w]:
            others = [vm.o[y] for y in ep.exp_nodes[w] if y != x]
            for e in ep.edges_between(x, x):
                if e.owner == w:
                    out.extend([-vm.c[e.key], -vm.m[(x, v)]] + others for v in loops)
    return out


def emit_empty(ctx: _Context) -> list:
    """How empty any-0+ wildcards and their pattern edges are accounted for.

    Each pattern edge (a, b) needs a realised key covering it, unless b is a
    sink placeholder or a a source placeholder. A key routed through w needs
    w empty and not a dangling placeholder.
    """
    ep, vm = ctx.ep, ctx.vm
    p = ep.pattern
    out = []
    covering = {e: [] for e in sorted(p.edges)}
    for e in ep.edges:
        for pe in e.pattern_edges:
            covering[pe].append(vm.c[e.key])
        for w in e.route:
            for lit in ctx.present(w):
                out.append([-vm.c[e.key], -lit])
            for fam in (vm.sink, vm.source):
                if w in fam:
                    out.append([-vm.c[e.key], -fam[w]])
    for (a, b), lits in covering.items():
        clause = list(lits)
        if b in vm.sink:
            clause.append(vm.sink[b])
        if a in vm.source:
            clause.append(vm.source[a])
        out.append(clause)
    for fam, fwd, back, other in (
        (vm.sink, p.successors, p.predecessors, vm.source),
        (vm.source, p.predecessors, p.successors, vm.sink),
    ):
        for w, var in sorted(fam.items()):
            for lit in ctx.present(w):
                out.append([-var, -lit])
            if w in other:
                out.append([-var, -other[w]])
            for s in sorted(fwd(w)):
                out.append([-var, fam[s]])
            for q in sorted(back(w)):
                if q in other:
                    out.append([-var, -other[q]])
    for w in p.wildcards:
        if not p.kind[w].allows_empty:
            continue
        if not p.successors(w) or not p.predecessors(w):
            clause = ctx.present(w)
            if not p.successors(w) and w in vm.sink:
                clause = clause + [vm.sink[w]]
            if not p.predecessors(w) and w in vm.source:
                clause = clause + [vm.source[w]]
            out.append(clause)
    return out


def emit_attribute(ctx: _Context) -> list:
    """Node constraints as unit clauses; pair constraints as implications."""
    ep, g, vm = ctx.ep, ctx.g, ctx.vm
    out = []
    for x in ep.nodes:
        live = set(ctx.live[x])
        out.extend([[-vm.m[(x, v)]] for v in g.nodes if v not in live])
    for (a, b), psi in sorted(ep.pattern.pair_constraints.items()):
        for u in g.nodes:
            support = [
                vm.m[(b, v)]
                for v in g.nodes
                if v != u and eval_pair_constraint(psi, g.node_attrs[u], g.node_attrs[v])
            ]
            out.append([-vm.m[(a, u)]] + support)
    return out


# --- pipeline ---------------------------------------------------------------------


@dataclass
class Encoding:
    formula: CnfFormula
    varmap: VarMap
    expanded: ExpandedPattern
    graph: AttributedGraph  # after merging
    merge_report: MergeReport


def encode(p: ReGaP, g: AttributedGraph, options: EncodeOptions | None = None) -> Encoding:
    options = options or EncodeOptions()
    if options.merge:
        g, report = merge_fixpoint(g, p)
    else:
        report = MergeReport(nodes_before=len(g.nodes), nodes_after=len(g.nodes))
    ep = expand(p, g, options.k)
    vm = allocate_vars(ep, g)
    ctx = _Context(ep, g, vm, options)
    clauses = []
    for emit in (emit_base, emit_sequence, emit_subgraph, emit_empty, emit_attribute):
        clauses.extend(emit(ctx))
    formula = CnfFormula(vm.num_vars, clauses)
    return Encoding(formula, vm, ep, g, report)
