"""Seeded random graphs, patterns and matching instances."""

from __future__ import annotations

import random
import string
from dataclasses import dataclass

from .constraints import TRUE, And, Compare, Has, Not, Or, PairCompare, Ref, eval_edge_constraint, eval_node_constraint
from .graph import CONCRETE, AttributedGraph, ReGaP, WildcardKind
from . import oracle as orc

ATTR_VALUES = (-1, 0, 1, 2)
_KIND_BACK = {orc.SP: WildcardKind.SEQ1PLUS, orc.GP: WildcardKind.SUB1PLUS,
              orc.SS: WildcardKind.SEQ0PLUS, orc.GS: WildcardKind.SUB0PLUS}


@dataclass(frozen=True)
class InstanceConfig:
    max_graph_nodes: int = 6
    max_pattern_nodes: int = 5
    max_wildcards: int = 2
    edge_prob: float = 0.3
    loop_prob: float = 0.05
    constraint_density: float = 0.5  # chance that a concrete node/edge gets a constraint
    allow_wildcard_edges: bool = True


def random_graph(rng: random.Random, n: int, edge_prob: float = 0.3, loop_prob: float = 0.05) -> AttributedGraph:
    nodes = [f"v{i}" for i in range(n)]
    edges = set()
    for u in nodes:
        for v in nodes:
            if (u == v and rng.random() < loop_prob) or (u != v and rng.random() < edge_prob):
                edges.add((u, v))
    node_attrs = {v: {"x": rng.choice(ATTR_VALUES)} for v in nodes}
    for v in nodes:
        if rng.random() < 0.3:
            node_attrs[v]["tag"] = rng.choice(["a", "b"])
    edge_attrs = {e: {"w": rng.choice(ATTR_VALUES)} for e in sorted(edges)}
    return AttributedGraph(tuple(nodes), frozenset(edges), node_attrs, edge_attrs)


def random_node_constraint(rng: random.Random, attrs=None):
    """A small constraint; when ``attrs`` is given it is satisfied by them."""
    for _ in range(20):
        op = rng.choice(["eq", "ne", "lt", "le", "gt", "ge"])
        c = Compare("x", op, rng.choice(ATTR_VALUES))
        r = rng.random()
        if r < 0.15:
            c = Not(c)
        elif r < 0.25:
            c = Or((c, Has("tag")))
        elif r < 0.3:
            c = And((c, Compare("x", "ge", -1)))
        if attrs is None:
            return c

        if eval_node_constraint(c, attrs):
            return c
    return TRUE


def random_edge_constraint(rng: random.Random, attrs=None):
    for _ in range(20):
        c = Compare("w", rng.choice(["le", "ge", "ne"]), rng.choice(ATTR_VALUES))
        if attrs is None:
            return c

        if all(eval_edge_constraint(c, a) for a in attrs):
            return c
    return TRUE


def random_pair_constraint(rng: random.Random):
    return PairCompare(Ref("u", "x"), rng.choice(["lt", "le", "ne", "eq"]), Ref("v", "x"))


def _names(n):
    return list(string.ascii_uppercase[:n])


def random_pattern(rng: random.Random, cfg: InstanceConfig) -> ReGaP:
    n = rng.randint(1, cfg.max_pattern_nodes)
    n_wild = rng.randint(0, min(cfg.max_wildcards, n))
    nodes = _names(n)
    kind = {v: CONCRETE for v in nodes}
    for w in rng.sample(nodes, n_wild):
        kind[w] = rng.choice(list(WildcardKind))
    edges = set()
    for u in nodes:
        for v in nodes:
            if u == v:
                if kind[u] == CONCRETE and rng.random() < cfg.loop_prob:
                    edges.add((u, v))
            elif rng.random() < cfg.edge_prob + 0.1:
                if not cfg.allow_wildcard_edges and kind[u] != CONCRETE and kind[v] != CONCRETE:
                    continue
                edges.add((u, v))
    return _decorate(rng, nodes, kind, edges, cfg, None, None)


def _decorate(rng, nodes, kind, edges, cfg, node_attrs, edge_under) -> ReGaP:
    node_c, edge_c, pair_c = {}, {}, {}
    conc = [v for v in nodes if kind[v] == CONCRETE]
    for v in conc:
        if rng.random() < cfg.constraint_density:
            attrs = None if node_attrs is None or rng.random() < 0.1 else node_attrs[v]
            node_c[v] = random_node_constraint(rng, attrs)
    for e in sorted(edges):
        if rng.random() < cfg.constraint_density / 2:
            attrs = None if edge_under is None or rng.random() < 0.1 else edge_under[e]
            edge_c[e] = random_edge_constraint(rng, attrs)
    if len(conc) >= 2 and rng.random() < cfg.constraint_density / 3:
        a, b = rng.sample(conc, 2)
        pair_c[(a, b)] = random_pair_constraint(rng)
    return ReGaP(tuple(nodes), kind, frozenset(edges), node_c, edge_c, pair_c)


def planted_pattern(rng: random.Random, g: AttributedGraph, cfg: InstanceConfig, steps: int = 12):
    """Generalize ``g`` by random rule applications and read the result as a pattern."""
    s = orc.initial_state(g)
    last = 1
    for _ in range(steps):
        rule = rng.choice([r for r in range(last, orc.RULE_COUNT + 1)] + [1, 2, 3, 6, 6, 7])
        if rule < last:
            continue
        moves = list(_moves(s, rule))
        if not moves:
            continue
        try:
            nxt = orc.apply_rule(s, rule, rng.choice(moves))
        except orc.RuleError:
            continue
        n_wild = sum(1 for n in nxt.nodes.values() if n.kind != orc.C)
        if n_wild > cfg.max_wildcards:
            continue
        if any(a == b and nxt.nodes[a].kind != orc.C for a, b in nxt.edges):
            continue
        s, last = nxt, rule
    if len(s.nodes) > cfg.max_pattern_nodes:
        return None
    if any(a == b and s.nodes[a].kind != orc.C for a, b in s.edges):
        return None
    names = {}
    conc = iter(_names(26))
    wild = iter(f"W{i}" for i in range(1, 27))
    for i in sorted(s.nodes):
        names[i] = next(conc) if s.nodes[i].kind == orc.C else next(wild)
    kind = {names[i]: (CONCRETE if n.kind == orc.C else _KIND_BACK[n.kind]) for i, n in s.nodes.items()}
    edges = {(names[a], names[b]) for a, b in s.edges}
    node_attrs = {names[i]: g.node_attrs[n.contents[0]] for i, n in s.nodes.items() if n.kind == orc.C}
    under = {(names[a], names[b]): [g.edge_attrs[e] for e in u] for (a, b), u in s.edges.items()}
    return _decorate(rng, sorted(kind), kind, edges, cfg, node_attrs, under)


def _moves(s, rule):
    nodes = s.nodes
    kinds = {k: [i for i, n in nodes.items() if n.kind == k] for k in (orc.C, orc.SP, orc.GP, orc.SS, orc.GS)}
    if rule == 1:
        return [(u, k) for u in kinds[orc.C] for k in (orc.SP, orc.GP)]
    if rule == 2:
        return [(u, w) for w in kinds[orc.SP] for u in s.pred(w)
                if nodes[u].kind == orc.C and s.succ(u) == {w} and s.pred(w) == {u}]
    if rule == 3:
        return [(a, b, k) for (a, b) in sorted(s.edges) for k in (orc.SS, orc.GS)]
    if rule in (4, 9, 10):
        return [(a, b) for a in kinds[orc.SS] for b in kinds[orc.SS] if a < b]
    if rule in (5, 11, 12):
        return [(a, w) for w in kinds[orc.GS] for a in kinds[orc.SS] + kinds[orc.GS] if a != w]
    if rule == 6:
        full = [i for i, n in nodes.items() if n.kind != orc.C and not n.empty]
        return [(a, w) for a in kinds[orc.SP] + kinds[orc.GP] for w in full if a != w]
    if rule in (7, 8):
        return [(a, k) for a in sorted(nodes) for k in (orc.SS, orc.GS)
                if not (s.succ(a) if rule == 7 else s.pred(a))]
    if rule == 13:
        return [(a,) for a in kinds[orc.SP]]
    if rule == 14:
        return [(a,) for a in kinds[orc.GP]]
    return []


def mutate(rng: random.Random, p: ReGaP) -> ReGaP:
    """Flip one edge or one wildcard kind."""
    kind = dict(p.kind)
    edges = set(p.edges)
    nodes = list(p.nodes)
    if rng.random() < 0.6 or not p.wildcards:
        u, v = rng.choice(nodes), rng.choice(nodes)
        if (u, v) in edges:
            edges.discard((u, v))
        elif u != v or kind[u] == CONCRETE:
            edges.add((u, v))
    else:
        w = rng.choice(p.wildcards)
        kind[w] = rng.choice([k for k in WildcardKind if k != kind[w]])
    edge_c = {e: c for e, c in p.edge_constraints.items() if e in edges}
    return ReGaP(p.nodes, kind, frozenset(edges), p.node_constraints, edge_c, p.pair_constraints)


def random_instance(rng: random.Random, cfg: InstanceConfig = InstanceConfig()):
    """A (pattern, graph) pair: random, planted, or a mutated planted pattern."""
    while True:
        n = rng.randint(1, cfg.max_graph_nodes)
        g = random_graph(rng, n, cfg.edge_prob, cfg.loop_prob)
        r = rng.random()
        if r < 0.3:
            p = random_pattern(rng, cfg)
        else:
            p = planted_pattern(rng, g, cfg)
            if p is None:
                continue
            if r > 0.75:
                p = mutate(rng, p)
        if len(p.wildcards) > cfg.max_wildcards or len(p.nodes) > cfg.max_pattern_nodes:
            continue
        if not cfg.allow_wildcard_edges and p.has_wildcard_edge:
            continue
        return p, g
