"""Regular graph pattern matching by reduction to SAT."""

from .graph import (
    AttributedGraph,
    ReGaP,
    WildcardKind,
    load_graph,
    load_pattern,
    make_graph,
    make_pattern,
)

__all__ = [
    "AttributedGraph",
    "ReGaP",
    "WildcardKind",
    "load_graph",
    "load_pattern",
    "make_graph",
    "make_pattern",
]
