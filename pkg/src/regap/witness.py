"""Match witnesses: decoding from SAT models and an independent checker.

A witness assigns every graph node to a pattern node. Wildcards collect
the nodes they absorb (sequences in path order). Graph edges that bypass
empty any-0+ wildcards list those wildcards in ``routes``. Empty any-0+
wildcards hanging off the end (start) of the generalized graph are listed
in ``sinks`` (``sources``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constraints import eval_edge_constraint, eval_node_constraint, eval_pair_constraint
from .graph import CONCRETE, AttributedGraph, ReGaP, WildcardKind


class WitnessError(AssertionError):
    """A decoded model does not describe a valid match (encoder bug)."""


@dataclass
class MatchWitness:
    mapping: dict  # graph node -> original pattern node
    wildcard_contents: dict = field(default_factory=dict)  # wildcard -> list of graph nodes
    routes: dict = field(default_factory=dict)  # graph edge -> tuple of bypassed wildcards
    sinks: tuple = ()
    sources: tuple = ()

    def to_dict(self) -> dict:
        return {
            "mapping": dict(sorted(self.mapping.items())),
            "wildcard_contents": {w: list(c) for w, c in sorted(self.wildcard_contents.items())},
            "routes": [
                {"src": u, "dst": v, "via": list(r)} for (u, v), r in sorted(self.routes.items())
            ],
            "sinks": list(self.sinks),
            "sources": list(self.sources),
        }


def decode_model(model: dict, enc) -> MatchWitness:
    """Read a witness (over the merged graph) off a model of ``enc.formula``."""
    ep, vm, g = enc.expanded, enc.varmap, enc.graph
    p = ep.original
    node_of = {}
    for (x, v), var in vm.m.items():
        if model.get(var):
            if v in node_of:
                raise WitnessError(f"graph node {v!r} mapped twice")
            node_of[v] = x
    image = {}
    for v, x in node_of.items():
        if x in image:
            raise WitnessError(f"pattern node {x!r} takes both {image[x]!r} and {v!r}")
        image[x] = v
    mapping = {v: ep.source[ep.origin[x]] for v, x in node_of.items()}
    contents = {w: [] for w in p.wildcards}
    for w in p.wildcards:
        if p.kind[w] == WildcardKind.SEQ1PLUS:
            slots = [f"{w}^"] + list(ep.exp_nodes[f"{w}~"])
        else:
            slots = list(ep.exp_nodes[w])
        taken = [image[s] for s in slots if s in image]
        contents[w] = taken if p.kind[w].is_sequence else sorted(taken)
    tails = {n for n in ep.pattern.nodes if ep.source[n] != n and ep.pattern.kind[n] != CONCRETE}
    routes = {}
    for u, v in g.sorted_edges():
        if u not in node_of or v not in node_of:
            continue
        chosen = [e for e in ep.edges_between(node_of[u], node_of[v]) if model.get(vm.c[e.key])]
        if len(chosen) != 1:
            raise WitnessError(f"graph edge {(u, v)!r} realises {len(chosen)} keys")
        route = tuple(ep.source[w] for w in chosen[0].route if w not in tails)
        if route:
            routes[(u, v)] = route
    sinks = tuple(sorted(w for w, var in vm.sink.items() if model.get(var) and w not in tails))
    sources = tuple(sorted(w for w, var in vm.source.items() if model.get(var) and w not in tails))
    return MatchWitness(mapping, contents, routes, sinks, sources)


def lift_witness(w: MatchWitness, merged_pairs, p: ReGaP) -> MatchWitness:
    """Undo node merging: each removed u joins the group of the v it merged into."""
    mapping = dict(w.mapping)
    contents = {k: list(c) for k, c in w.wildcard_contents.items()}
    routes = dict(w.routes)
    for u, v in reversed(list(merged_pairs)):
        owner = mapping[v]
        mapping[u] = owner
        group = contents[owner]
        if p.kind[owner].is_sequence:
            group.insert(group.index(v), u)
        else:
            group.append(u)
            group.sort()
        # Before the merge, edges into v arrived at u instead.
        for (a, b) in list(routes):
            if b == v:
                routes[(a, u)] = routes.pop((a, b))
    return MatchWitness(mapping, contents, routes, w.sinks, w.sources)


def check_witness(p: ReGaP, g: AttributedGraph, w: MatchWitness) -> list:
    """Return the list of violated conditions (empty when ``w`` is a valid match)."""
    problems = []
    bad = problems.append
    if set(w.mapping) != set(g.nodes):
        bad("mapping does not cover exactly the graph nodes")
        return problems
    for v, n in w.mapping.items():
        if n not in p.kind:
            bad(f"{v!r} mapped to unknown pattern node {n!r}")
            return problems
    members = {n: [v for v in g.nodes if w.mapping[v] == n] for n in p.nodes}
    for n in p.concrete:
        if len(members[n]) != 1:
            bad(f"concrete node {n!r} has {len(members[n])} images")
    if problems:
        return problems
    img = {n: members[n][0] for n in p.concrete}
    for n in p.concrete:
        if not eval_node_constraint(p.node_constraint(n), g.node_attrs[img[n]]):
            bad(f"node constraint of {n!r} fails")
    for (a, b), psi in p.pair_constraints.items():
        if not eval_pair_constraint(psi, g.node_attrs[img[a]], g.node_attrs[img[b]]):
            bad(f"pair constraint on {(a, b)!r} fails")
    for n in p.wildcards:
        got = list(w.wildcard_contents.get(n, []))
        if sorted(got) != sorted(members[n]):
            bad(f"contents of {n!r} disagree with the mapping")
            return problems
        if not p.kind[n].allows_empty and not got:
            bad(f"1+ wildcard {n!r} is empty")
        if p.kind[n].is_sequence and got:
            problems.extend(_check_sequence(g, n, got))
    empty = {n for n in p.wildcards if not members[n]}
    realised = set()
    routed = set()
    for (x, y) in g.sorted_edges():
        a, b = w.mapping[x], w.mapping[y]
        route = tuple(w.routes.get((x, y), ()))
        if not route and a == b and p.kind[a] != CONCRETE:
            if p.kind[a].is_sequence:
                seq = w.wildcard_contents[a]
                if not any(seq[i] == x and seq[i + 1] == y for i in range(len(seq) - 1)):
                    bad(f"edge {(x, y)!r} inside sequence {a!r} is not a path edge")
            elif len(members[a]) == 1:
                bad(f"self-loop {(x, y)!r} of single-node subgraph {a!r} is not absorbed")
            continue  # internal edge
        if route and a == b and p.kind[a] != CONCRETE and p.kind[a].is_sequence:
            seq = w.wildcard_contents[a]
            if (x, y) != (seq[-1], seq[0]):
                bad(f"routed edge {(x, y)!r} inside sequence {a!r} must go from last to first")
        chain = (a,) + route + (b,)
        for r in route:
            if r not in empty or not p.kind[r].allows_empty or r in chain[:1] + chain[-1:]:
                bad(f"edge {(x, y)!r} is routed through {r!r}, which is not an empty 0+ wildcard")
            if r in w.sinks or r in w.sources:
                bad(f"{r!r} is both routed and a dangling placeholder")
            routed.add(r)
        if len(set(route)) != len(route):
            bad(f"route of {(x, y)!r} repeats a wildcard")
        for pe in zip(chain, chain[1:]):
            if pe not in p.edges:
                bad(f"graph edge {(x, y)!r} yields {pe!r}, not a pattern edge")
            elif not eval_edge_constraint(p.edge_constraint(pe), g.edge_attrs[(x, y)]):
                bad(f"edge constraint of {pe!r} fails on {(x, y)!r}")
            realised.add(pe)
    for fam, other, fwd, back, name in (
        (w.sinks, w.sources, p.successors, p.predecessors, "sink"),
        (w.sources, w.sinks, p.predecessors, p.successors, "source"),
    ):
        for n in fam:
            if n not in empty or not p.kind[n].allows_empty:
                bad(f"{name} placeholder {n!r} is not an empty 0+ wildcard")
            if n in other:
                bad(f"{n!r} is both sink and source")
            if not back(n):
                bad(f"{name} placeholder {n!r} has no anchor")
            if len(fwd(n)) > 1 or any(s not in fam for s in fwd(n)):
                bad(f"{name} placeholder {n!r} continues into a non-placeholder")
            elif _on_cycle(n, fwd):
                bad(f"{name} placeholder {n!r} lies on a cycle")
            elif fwd(n) and len(back(n)) != 1:
                bad(f"{name} placeholder {n!r} continues but has several anchors")
            for q in back(n):
                if len(fwd(q)) != 1 or q in other:
                    bad(f"{name} placeholder {n!r} hangs off {q!r}, which has other neighbours")
                realised.add((q, n) if name == "sink" else (n, q))
    for n in sorted(empty):
        if p.kind[n].allows_empty and n not in routed and n not in w.sinks and n not in w.sources:
            bad(f"empty wildcard {n!r} is not realised")
    if realised != set(p.edges):
        missing = sorted(set(p.edges) - realised)
        extra = sorted(realised - set(p.edges))
        if missing:
            bad(f"pattern edges without a graph counterpart: {missing}")
        if extra:
            bad(f"generalized edges missing from the pattern: {extra}")
    return problems


def _check_sequence(g: AttributedGraph, n, seq) -> list:
    problems = []
    if len(set(seq)) != len(seq):
        return [f"sequence {n!r} repeats a node"]
    for i, x in enumerate(seq):
        if i + 1 < len(seq):
            if g.successors(x) != {seq[i + 1]}:
                problems.append(f"sequence {n!r}: {x!r} must have exactly one successor")
        if i > 0:
            if g.predecessors(x) != {seq[i - 1]}:
                problems.append(f"sequence {n!r}: {x!r} must have exactly one predecessor")
    return problems


def _on_cycle(n, fwd) -> bool:
    seen = set()
    while len(fwd(n)) == 1:
        if n in seen:
            return True
        seen.add(n)
        (n,) = fwd(n)
    return False
