"""Node merging: contract graph edges that no concrete pattern node can see.

An edge (u, v) can be contracted when neither endpoint satisfies any
concrete node constraint, u has no other successor and v no other
predecessor. Such a pair can only ever be consumed together by one
wildcard, so replacing it by a single node keeps match/no-match intact
as long as the pattern has no wildcard-wildcard edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constraints import eval_node_constraint
from .graph import AttributedGraph, ReGaP


class MergeError(ValueError):
    pass


@dataclass
class MergeReport:
    merged_pairs: list = field(default_factory=list)
    nodes_before: int = 0
    nodes_after: int = 0
    applied: bool = False

    def to_dict(self):
        return {
            "merged_pairs": [list(e) for e in self.merged_pairs],
            "nodes_before": self.nodes_before,
            "nodes_after": self.nodes_after,
            "applied": self.applied,
        }


def visible_nodes(g: AttributedGraph, p: ReGaP) -> set:
    """Graph nodes accepted by at least one concrete pattern node."""
    return {
        v
        for v in g.nodes
        if any(eval_node_constraint(p.node_constraint(n), g.node_attrs[v]) for n in p.concrete)
    }


def _is_mergeable(g, u, v, visible):
    return (
        u != v
        and u not in visible
        and v not in visible
        and g.predecessors(v) == {u}
        and g.successors(u) == {v}
        # Contracting a 2-cycle would leave a self-loop that a one-node subgraph cannot absorb.
        and (v, u) not in g.edges
    )


def mergeable_edges(g: AttributedGraph, p: ReGaP, visible: set | None = None) -> set:
    if p.has_wildcard_edge:
        raise MergeError("merging requires a pattern without wildcard-wildcard edges")
    if visible is None:
        visible = visible_nodes(g, p)
    return {(u, v) for u, v in g.edges if _is_mergeable(g, u, v, visible)}


def merge_once(g: AttributedGraph, edge, p: ReGaP | None = None, visible: set | None = None) -> AttributedGraph:
    """Remove u and redirect its in-edges to v; v keeps its own attributes."""
    u, v = edge
    if visible is None:
        visible = visible_nodes(g, p) if p is not None else set()
    if edge not in g.edges or not _is_mergeable(g, u, v, visible):
        raise MergeError(f"edge {edge!r} is not mergeable")
    edges = set()
    edge_attrs = {}
    for e in g.edges:
        a, b = e
        if e == (u, v):
            continue
        if b == u:
            # a != u here: u's only successor is v.
            new = (a, v)
        else:
            new = e
        edges.add(new)
        edge_attrs[new] = g.edge_attrs[e]
    nodes = [n for n in g.nodes if n != u]
    return AttributedGraph(
        nodes=tuple(nodes),
        edges=frozenset(edges),
        node_attrs={n: g.node_attrs[n] for n in nodes},
        edge_attrs=edge_attrs,
    )


def merge_fixpoint(g: AttributedGraph, p: ReGaP):
    """Contract mergeable edges in sorted order until none remain."""
    report = MergeReport(nodes_before=len(g.nodes), nodes_after=len(g.nodes))
    if p.has_wildcard_edge:
        return g, report
    report.applied = True
    visible = visible_nodes(g, p)
    while True:
        candidates = sorted(mergeable_edges(g, p, visible))
        if not candidates:
            break
        g = merge_once(g, candidates[0], visible=visible)
        report.merged_pairs.append(candidates[0])
    report.nodes_after = len(g.nodes)
    return g, report
