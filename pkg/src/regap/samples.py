"""Small hand-made instances used by the tests, the README and the CLI data files."""

from __future__ import annotations

from .constraints import Compare
from .graph import WildcardKind, make_graph, make_pattern


def loop_graph():
    """v1 -> v2 -> v3 -> v4, a v4 <-> v5 loop, and v4 branching to v6 and v7."""
    return make_graph([("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v5"),
                       ("v5", "v4"), ("v4", "v6"), ("v4", "v7")])


def loop_pattern():
    """A -> S+ -> B, B <-> C, B -> G+; matches ``loop_graph``."""
    return make_pattern([("A", "S"), ("S", "B"), ("B", "C"), ("C", "B"), ("B", "G")],
                        kinds={"S": WildcardKind.SEQ1PLUS, "G": WildcardKind.SUB1PLUS})


def guarded_pattern():
    """A (x < 0) -> S+ -> B (x = 0)."""
    return make_pattern([("A", "S"), ("S", "B")], kinds={"S": WildcardKind.SEQ1PLUS},
                        node_constraints={"A": Compare("x", "lt", 0), "B": Compare("x", "eq", 0)})


_XS = {"v1": {"x": -1}, "v2": {"x": 1}, "v3": {"x": 2}, "v4": {"x": 0}}


def guarded_chain():
    """v1 -> v2 -> v3 -> v4; matches ``guarded_pattern``."""
    return make_graph([("v1", "v2"), ("v2", "v3"), ("v3", "v4")], node_attrs=_XS)


def guarded_branch():
    """v2 branches to v3 and v4, so the sequence cannot reach B; no match."""
    return make_graph([("v1", "v2"), ("v2", "v3"), ("v2", "v4")], node_attrs=_XS)
