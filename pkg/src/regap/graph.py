"""Attributed directed graphs and ReGaP patterns, plus their JSON formats."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .constraints import (
    TRUE,
    ConstraintFormatError,
    dump_constraint,
    is_trivially_true,
    parse_constraint,
    value_kind,
)


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph/pattern documents."""


class WildcardKind(enum.Enum):
    SEQ0PLUS = "seq0plus"  # S*
    SEQ1PLUS = "seq1plus"  # S+
    SUB0PLUS = "sub0plus"  # G*
    SUB1PLUS = "sub1plus"  # G+

    @property
    def is_sequence(self) -> bool:
        return self in (WildcardKind.SEQ0PLUS, WildcardKind.SEQ1PLUS)

    @property
    def allows_empty(self) -> bool:
        return self in (WildcardKind.SEQ0PLUS, WildcardKind.SUB0PLUS)

    @property
    def symbol(self) -> str:
        return {"seq0plus": "S*", "seq1plus": "S+", "sub0plus": "G*", "sub1plus": "G+"}[self.value]


CONCRETE = "concrete"
_KINDS = {k.value: k for k in WildcardKind}


def _adjacency(nodes, edges):
    out = {n: set() for n in nodes}
    inn = {n: set() for n in nodes}
    for u, v in edges:
        out[u].add(v)
        inn[v].add(u)
    return out, inn


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Simple directed graph; self-loops allowed, parallel edges not."""

    nodes: tuple
    edges: frozenset
    node_attrs: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)
    edge_attrs: Mapping[tuple, Mapping[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes))
        if len(set(nodes)) != len(nodes):
            raise GraphFormatError("duplicate node id")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(self.edges))
        known = set(nodes)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise GraphFormatError(f"dangling edge endpoint in ({u!r}, {v!r})")
        object.__setattr__(self, "node_attrs", {n: dict(self.node_attrs.get(n, {})) for n in nodes})
        object.__setattr__(
            self, "edge_attrs", {e: dict(self.edge_attrs.get(e, {})) for e in self.edges}
        )
        out, inn = _adjacency(nodes, self.edges)
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inn)

    def successors(self, v):
        return self._out[v]

    def predecessors(self, v):
        return self._in[v]

    def __eq__(self, other):
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.node_attrs == other.node_attrs
            and self.edge_attrs == other.edge_attrs
        )

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __len__(self):
        return len(self.nodes)

    def sorted_edges(self):
        return sorted(self.edges)


@dataclass(frozen=True, eq=False)
class ReGaP:
    """A pattern graph whose nodes are concrete or wildcards.

    ``kind`` maps every node to ``CONCRETE`` or a :class:`WildcardKind`.
    Missing constraints mean "always true".
    """

    nodes: tuple
    kind: Mapping[str, Any]
    edges: frozenset
    node_constraints: Mapping[str, Any] = field(default_factory=dict)
    edge_constraints: Mapping[tuple, Any] = field(default_factory=dict)
    pair_constraints: Mapping[tuple, Any] = field(default_factory=dict)

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes))
        if len(set(nodes)) != len(nodes):
            raise GraphFormatError("duplicate node id")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(self.edges))
        known = set(nodes)
        kind = dict(self.kind)
        for n in nodes:
            k = kind.setdefault(n, CONCRETE)
            if k != CONCRETE and not isinstance(k, WildcardKind):
                raise GraphFormatError(f"unknown node kind {k!r}")
        object.__setattr__(self, "kind", kind)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise GraphFormatError(f"dangling edge endpoint in ({u!r}, {v!r})")
            if u == v and kind[u] != CONCRETE:
                raise GraphFormatError(f"self-loop on wildcard {u!r} is not supported")
        for n in self.node_constraints:
            if n not in known:
                raise GraphFormatError(f"constraint on unknown node {n!r}")
            if kind[n] != CONCRETE and not is_trivially_true(self.node_constraints[n]):
                raise GraphFormatError(f"node constraint attached to wildcard {n!r}")
        for e in self.edge_constraints:
            if e not in self.edges:
                raise GraphFormatError(f"edge constraint on unknown edge {e!r}")
        for (u, v) in self.pair_constraints:
            if u == v:
                raise GraphFormatError("pair constraint endpoints must differ")
            for n in (u, v):
                if n not in known:
                    raise GraphFormatError(f"pair constraint on unknown node {n!r}")
                if kind[n] != CONCRETE:
                    raise GraphFormatError(f"pair constraint touches wildcard {n!r}")
        object.__setattr__(
            self,
            "node_constraints",
            {n: c for n, c in self.node_constraints.items() if kind[n] == CONCRETE},
        )
        object.__setattr__(self, "edge_constraints", dict(self.edge_constraints))
        object.__setattr__(self, "pair_constraints", dict(self.pair_constraints))
        out, inn = _adjacency(nodes, self.edges)
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inn)

    @property
    def wildcards(self) -> list:
        return [n for n in self.nodes if self.kind[n] != CONCRETE]

    @property
    def concrete(self) -> list:
        return [n for n in self.nodes if self.kind[n] == CONCRETE]

    def is_wildcard(self, n) -> bool:
        return self.kind[n] != CONCRETE

    @property
    def has_wildcard_edge(self) -> bool:
        return any(self.is_wildcard(u) and self.is_wildcard(v) for u, v in self.edges)

    def node_constraint(self, n):
        return self.node_constraints.get(n, TRUE)

    def edge_constraint(self, e):
        return self.edge_constraints.get(e, TRUE)

    def successors(self, v):
        return self._out[v]

    def predecessors(self, v):
        return self._in[v]

    def __eq__(self, other):
        if not isinstance(other, ReGaP):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.kind == other.kind
            and self.edges == other.edges
            and _nontrivial(self.node_constraints) == _nontrivial(other.node_constraints)
            and _nontrivial(self.edge_constraints) == _nontrivial(other.edge_constraints)
            and _nontrivial(self.pair_constraints) == _nontrivial(other.pair_constraints)
        )

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __len__(self):
        return len(self.nodes)


def _nontrivial(mapping):
    return {k: c for k, c in mapping.items() if not is_trivially_true(c)}


def neighbors(g, node, direction: str) -> set:
    """In- or out-neighbours of ``node`` in a graph or pattern."""
    known = g.kind if isinstance(g, ReGaP) else g.node_attrs
    if node not in known:
        raise KeyError(f"unknown node {node!r}")
    if direction == "out":
        return set(g.successors(node))
    if direction == "in":
        return set(g.predecessors(node))
    raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")


# --- JSON -------------------------------------------------------------------


def _load_doc(data):
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GraphFormatError("document must be a JSON object")
    return data


def _attrs(doc):
    attrs = doc.get("attrs", {})
    if not isinstance(attrs, dict):
        raise GraphFormatError(f"attrs must be an object: {attrs!r}")
    try:
        for v in attrs.values():
            value_kind(v)
    except ConstraintFormatError as exc:
        raise GraphFormatError(str(exc)) from exc
    return attrs


def _nodes_and_edges(doc):
    nodes = doc.get("nodes")
    edges = doc.get("edges", [])
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise GraphFormatError("'nodes' and 'edges' must be lists")
    seen = set()
    for n in nodes:
        if not isinstance(n, dict) or not isinstance(n.get("id"), str):
            raise GraphFormatError(f"bad node entry {n!r}")
        if n["id"] in seen:
            raise GraphFormatError(f"duplicate node id {n['id']!r}")
        seen.add(n["id"])
    pairs = set()
    for e in edges:
        if not isinstance(e, dict) or not isinstance(e.get("src"), str) or not isinstance(e.get("dst"), str):
            raise GraphFormatError(f"bad edge entry {e!r}")
        pair = (e["src"], e["dst"])
        if pair in pairs:
            raise GraphFormatError(f"duplicate edge {pair!r}")
        for end in pair:
            if end not in seen:
                raise GraphFormatError(f"dangling edge endpoint {end!r}")
        pairs.add(pair)
    return nodes, edges


def load_graph(data) -> AttributedGraph:
    doc = _load_doc(data)
    nodes, edges = _nodes_and_edges(doc)
    return AttributedGraph(
        nodes=tuple(n["id"] for n in nodes),
        edges=frozenset((e["src"], e["dst"]) for e in edges),
        node_attrs={n["id"]: _attrs(n) for n in nodes},
        edge_attrs={(e["src"], e["dst"]): _attrs(e) for e in edges},
    )


def load_pattern(data) -> ReGaP:
    doc = _load_doc(data)
    nodes, edges = _nodes_and_edges(doc)
    kind, node_c, edge_c, pair_c = {}, {}, {}, {}
    try:
        for n in nodes:
            k = n.get("kind", CONCRETE)
            if k == CONCRETE:
                kind[n["id"]] = CONCRETE
            elif k in _KINDS:
                kind[n["id"]] = _KINDS[k]
            else:
                raise GraphFormatError(f"unknown wildcard kind {k!r}")
            if "constraint" in n:
                node_c[n["id"]] = parse_constraint(n["constraint"])
        for e in edges:
            if "constraint" in e:
                edge_c[(e["src"], e["dst"])] = parse_constraint(e["constraint"])
        for pc in doc.get("pair_constraints", []):
            if not isinstance(pc, dict) or "u" not in pc or "v" not in pc:
                raise GraphFormatError(f"bad pair constraint {pc!r}")
            pair_c[(pc["u"], pc["v"])] = parse_constraint(pc.get("constraint", {"op": "true"}), pair=True)
    except ConstraintFormatError as exc:
        raise GraphFormatError(str(exc)) from exc
    # Reject any constraint on a wildcard, even a trivial one.
    for n, c in node_c.items():
        if kind[n] != CONCRETE:
            raise GraphFormatError(f"node constraint attached to wildcard {n!r}")
    return ReGaP(
        nodes=tuple(kind),
        kind=kind,
        edges=frozenset((e["src"], e["dst"]) for e in edges),
        node_constraints=node_c,
        edge_constraints=edge_c,
        pair_constraints=pair_c,
    )


def graph_to_dict(g: AttributedGraph) -> dict:
    return {
        "nodes": [{"id": n, "attrs": dict(g.node_attrs[n])} for n in g.nodes],
        "edges": [{"src": u, "dst": v, "attrs": dict(g.edge_attrs[(u, v)])} for u, v in g.sorted_edges()],
    }


def pattern_to_dict(p: ReGaP) -> dict:
    nodes = []
    for n in p.nodes:
        entry = {"id": n, "kind": CONCRETE if p.kind[n] == CONCRETE else p.kind[n].value}
        if n in p.node_constraints and not is_trivially_true(p.node_constraints[n]):
            entry["constraint"] = dump_constraint(p.node_constraints[n])
        nodes.append(entry)
    edges = []
    for u, v in sorted(p.edges):
        entry = {"src": u, "dst": v}
        c = p.edge_constraints.get((u, v))
        if c is not None and not is_trivially_true(c):
            entry["constraint"] = dump_constraint(c)
        edges.append(entry)
    doc = {"nodes": nodes, "edges": edges}
    pairs = [
        {"u": u, "v": v, "constraint": dump_constraint(c)}
        for (u, v), c in sorted(p.pair_constraints.items())
        if not is_trivially_true(c)
    ]
    if pairs:
        doc["pair_constraints"] = pairs
    return doc


def dumps(obj) -> str:
    doc = graph_to_dict(obj) if isinstance(obj, AttributedGraph) else pattern_to_dict(obj)
    return json.dumps(doc, sort_keys=True, indent=1)


def make_graph(edges: Iterable, nodes: Iterable = (), node_attrs=None, edge_attrs=None) -> AttributedGraph:
    """Convenience constructor used heavily by tests and the generator."""
    edges = [tuple(e) for e in edges]
    all_nodes = set(nodes) | {u for e in edges for u in e}
    return AttributedGraph(tuple(all_nodes), frozenset(edges), node_attrs or {}, edge_attrs or {})


def make_pattern(edges: Iterable, kinds: Mapping | None = None, nodes: Iterable = (),
                 node_constraints=None, edge_constraints=None, pair_constraints=None) -> ReGaP:
    edges = [tuple(e) for e in edges]
    kinds = dict(kinds or {})
    all_nodes = set(nodes) | {u for e in edges for u in e} | set(kinds)
    return ReGaP(
        tuple(all_nodes),
        {n: kinds.get(n, CONCRETE) for n in all_nodes},
        frozenset(edges),
        node_constraints or {},
        edge_constraints or {},
        pair_constraints or {},
    )
