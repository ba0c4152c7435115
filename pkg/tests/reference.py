"""Independent reference implementations used as test oracles."""

import itertools

from regap.constraints import eval_edge_constraint, eval_node_constraint, eval_pair_constraint


def iso_match(p, g) -> bool:
    """Wildcard-free matching: an attribute-respecting isomorphism from g onto p."""
    assert not p.wildcards
    if len(p.nodes) != len(g.nodes) or len(p.edges) != len(g.edges):
        return False
    gs = list(g.nodes)
    for perm in itertools.permutations(p.nodes):
        f = dict(zip(gs, perm))
        if any((f[a], f[b]) not in p.edges for a, b in g.edges):
            continue
        if not all(eval_node_constraint(p.node_constraint(f[v]), g.node_attrs[v]) for v in gs):
            continue
        if not all(eval_edge_constraint(p.edge_constraint((f[a], f[b])), g.edge_attrs[(a, b)]) for a, b in g.edges):
            continue
        inv = {b: a for a, b in f.items()}
        if all(eval_pair_constraint(c, g.node_attrs[inv[u]], g.node_attrs[inv[v]])
               for (u, v), c in p.pair_constraints.items()):
            return True
    return False


def isomorphic(g1, g2) -> bool:
    """Plain directed-graph isomorphism, attributes ignored."""
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return False
    for perm in itertools.permutations(g2.nodes):
        f = dict(zip(g1.nodes, perm))
        if all((f[a], f[b]) in g2.edges for a, b in g1.edges):
            return True
    return False


def dpll(clauses, assignment=None):
    """Textbook DPLL with unit propagation; returns a model dict or None."""
    true = {v if b else -v for v, b in (assignment or {}).items()}
    found = _dpll([frozenset(c) for c in clauses], true)
    return None if found is None else {abs(l): l > 0 for l in found}


def _dpll(clauses, true):
    true = set(true)
    while True:
        simplified = []
        units = set()
        false = {-l for l in true}
        for c in clauses:
            if not c.isdisjoint(true):
                continue
            rest = c - false
            if not rest:
                return None
            if len(rest) == 1:
                units |= rest
            simplified.append(rest)
        if not units:
            break
        if any(-l in units for l in units):
            return None
        true |= units
        clauses = simplified
    if not simplified:
        return true
    # Branch on the most frequent literal among the shortest clauses.
    short = min(len(c) for c in simplified)
    counts = {}
    for c in simplified:
        if len(c) == short:
            for lit in c:
                counts[lit] = counts.get(lit, 0) + 1
    lit = max(sorted(counts), key=counts.get)
    for choice in (lit, -lit):
        found = _dpll(simplified, true | {choice})
        if found is not None:
            return found
    return None
