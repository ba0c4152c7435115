"""Wildcard expansion: turn a ReGaP into a wildcard-free pattern skeleton.

Every any-1+-sequence S+ is first split into a fresh concrete head and an
any-0+-sequence tail. Sequence wildcards then become a path of k optional
slots, subgraph wildcards a structural copy of the graph. Pattern edges are
expanded into keyed edges: one key per pattern path a -> w1 -> ... -> b that
bypasses zero or more distinct any-0+ wildcards, and per choice of exit slot
of a and entry slot of b. Keys with a non-empty route are the skip edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .constraints import TRUE, eval_edge_constraint
from .graph import CONCRETE, AttributedGraph, ReGaP, WildcardKind


def choose_k(g: AttributedGraph, override: Optional[int] = None) -> int:
    """Number of slots per sequence wildcard; |V| unless overridden."""
    if override is not None:
        if override < 1:
            raise ValueError("k must be at least 1")
        return override
    return max(1, len(g.nodes))


def k_is_complete(k: int, g: AttributedGraph) -> bool:
    """A k below |V| may miss long sequences."""
    return k >= len(g.nodes)


def seq_head(w: str) -> str:
    return f"{w}^"


def seq_tail(w: str) -> str:
    return f"{w}~"


def rewrite_seq1plus(p: ReGaP) -> ReGaP:
    """Replace each S+ w by a concrete head w^ and an S* tail w~, joined by an edge."""
    seq1 = [w for w in p.nodes if p.kind[w] == WildcardKind.SEQ1PLUS]
    if not seq1:
        return p
    kind = dict(p.kind)
    rename_in, rename_out = {}, {}
    for w in seq1:
        head, tail = seq_head(w), seq_tail(w)
        for new in (head, tail):
            if new in p.kind:
                raise ValueError(f"node id {new!r} clashes with a generated id")
        del kind[w]
        kind[head] = CONCRETE
        kind[tail] = WildcardKind.SEQ0PLUS
        rename_in[w] = head
        rename_out[w] = tail
    edges, edge_c = set(), {}
    for (u, v) in p.edges:
        e = (rename_out.get(u, u), rename_in.get(v, v))
        edges.add(e)
        if (u, v) in p.edge_constraints:
            edge_c[e] = p.edge_constraints[(u, v)]
    for w in seq1:
        edges.add((seq_head(w), seq_tail(w)))
    return ReGaP(
        nodes=tuple(kind),
        kind=kind,
        edges=frozenset(edges),
        node_constraints=dict(p.node_constraints),
        edge_constraints=edge_c,
        pair_constraints=dict(p.pair_constraints),
    )


@dataclass(frozen=True, order=True)
class ExpEdge:
    """An edge of the expanded pattern.

    ``path`` lists the pattern nodes a, w1, ..., wj, b the edge stands for
    (empty for internal edges of a wildcard, whose ``owner`` is then set).
    """

    src: str
    dst: str
    path: tuple = ()
    owner: Optional[str] = None

    @property
    def route(self) -> tuple:
        return self.path[1:-1]

    @property
    def key(self) -> str:
        base = f"{self.src}>{self.dst}"
        return f"{base}|{','.join(self.route)}" if self.route else base

    @property
    def pattern_edges(self) -> list:
        return list(zip(self.path, self.path[1:]))


@dataclass
class ExpandedPattern:
    pattern: ReGaP  # after the S+ rewrite
    original: ReGaP
    k: int
    k_complete: bool
    nodes: tuple
    origin: dict  # expanded node -> node of ``pattern``
    source: dict  # node of ``pattern`` -> node of ``original``
    exp_nodes: dict  # wildcard of ``pattern`` -> ordered expanded nodes
    copy_of: dict  # subgraph copy node -> graph node
    edges: tuple
    _by_pair: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for e in self.edges:
            self._by_pair.setdefault((e.src, e.dst), []).append(e)

    @property
    def concrete(self) -> list:
        return [n for n in self.nodes if self.pattern.kind[self.origin[n]] == CONCRETE]

    def kind(self, base_node):
        return self.pattern.kind[base_node]

    def node_constraint(self, n):
        o = self.origin[n]
        return self.pattern.node_constraint(o) if self.pattern.kind[o] == CONCRETE else TRUE

    def edges_between(self, a, b) -> list:
        return self._by_pair.get((a, b), [])

    def edge_accepts(self, e: ExpEdge, attrs) -> bool:
        return all(eval_edge_constraint(self.pattern.edge_constraint(pe), attrs) for pe in e.pattern_edges)

    def mid_edges(self, w) -> list:
        return [e for e in self.edges if e.owner == w]

    def in_edges(self, w) -> list:
        return [e for e in self.edges if e.path and e.path[-1] == w]

    def out_edges(self, w) -> list:
        return [e for e in self.edges if e.path and e.path[0] == w]

    def skip_edges(self, w) -> list:
        return [e for e in self.edges if w in e.route]

    def entries(self, n) -> list:
        k = self.pattern.kind[n]
        if k == CONCRETE:
            return [n]
        if k.is_sequence:
            return self.exp_nodes[n][:1]
        return list(self.exp_nodes[n])

    def exits(self, n) -> list:
        return [n] if self.pattern.kind[n] == CONCRETE else list(self.exp_nodes[n])

    def as_pattern(self) -> ReGaP:
        """The expanded skeleton as a plain concrete pattern (keys collapsed per pair)."""
        node_c = {n: self.node_constraint(n) for n in self.nodes}
        return ReGaP(nodes=self.nodes, kind={n: CONCRETE for n in self.nodes},
                     edges=frozenset(self._by_pair), node_constraints=node_c)

    def bookkeeping(self) -> dict:
        return {
            "k": self.k,
            "k_complete": self.k_complete,
            "origin": {n: self.source[self.origin[n]] for n in self.nodes},
            "wildcards": {
                w: {
                    "kind": self.pattern.kind[w].value,
                    "nodes": list(self.exp_nodes[w]),
                    "mid": [e.key for e in self.mid_edges(w)],
                    "in": [e.key for e in self.in_edges(w)],
                    "out": [e.key for e in self.out_edges(w)],
                    "skip": [e.key for e in self.skip_edges(w)],
                }
                for w in self.pattern.wildcards
            },
            "edges": [{"key": e.key, "src": e.src, "dst": e.dst, "path": list(e.path)} for e in self.edges],
        }


def pattern_paths(p: ReGaP) -> list:
    """All paths a -> w1 -> ... -> wj -> b whose interior nodes are distinct
    any-0+ wildcards different from a and b (j >= 0)."""
    out = []

    def extend(path):
        for nxt in sorted(p.successors(path[-1])):
            if nxt in path[1:]:
                continue
            out.append(tuple(path) + (nxt,))
            k = p.kind[nxt]
            if nxt != path[0] and k != CONCRETE and k.allows_empty:
                extend(path + [nxt])

    for a in p.nodes:
        extend([a])
    return sorted(set(out))


def expand(p: ReGaP, g: AttributedGraph, k: Optional[int] = None) -> ExpandedPattern:
    original = p
    base = rewrite_seq1plus(p)
    source = {}
    for n in base.nodes:
        source[n] = n
    for w in original.wildcards:
        if original.kind[w] == WildcardKind.SEQ1PLUS:
            source[seq_head(w)] = w
            source[seq_tail(w)] = w
    kk = choose_k(g, k)
    nodes, origin, exp_nodes, copy_of = [], {}, {}, {}
    taken = set(base.nodes)
    for n in base.nodes:
        kind = base.kind[n]
        if kind == CONCRETE:
            made = [n]
        elif kind.is_sequence:
            made = [f"{n}#{i}" for i in range(1, kk + 1)]
        else:
            made = [f"{n}@{v}" for v in g.nodes]
            for v, m in zip(g.nodes, made):
                copy_of[m] = v
        if kind != CONCRETE:
            if taken.intersection(made):
                raise ValueError(f"expanded ids for {n!r} clash with existing node ids")
            taken.update(made)
            exp_nodes[n] = made
        for m in made:
            origin[m] = n
        nodes.extend(made)
    ep = ExpandedPattern(base, original, kk, k_is_complete(kk, g), tuple(nodes), origin,
                         source, exp_nodes, copy_of, ())
    edges = []
    for w, made in exp_nodes.items():
        if base.kind[w].is_sequence:
            edges.extend(ExpEdge(a, b, (), w) for a, b in zip(made, made[1:]))
        else:
            pos = {v: m for m, v in ((m, copy_of[m]) for m in made)}
            edges.extend(ExpEdge(pos[x], pos[y], (), w) for x, y in g.sorted_edges())
    for path in pattern_paths(base):
        for s in ep.exits(path[0]):
            for d in ep.entries(path[-1]):
                edges.append(ExpEdge(s, d, path))
    ep.edges = tuple(sorted(set(edges), key=lambda e: (e.src, e.dst, e.path, e.owner or "")))
    ep._by_pair = {}
    ep.__post_init__()
    return ep
