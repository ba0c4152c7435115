import random

from hypothesis import strategies as st

from regap.gen import InstanceConfig, random_instance
from regap.graph import AttributedGraph

NAMES = [f"v{i}" for i in range(8)]


@st.composite
def graphs(draw, max_nodes=6, attrs=True):
    n = draw(st.integers(1, max_nodes))
    nodes = NAMES[:n]
    pairs = [(u, v) for u in nodes for v in nodes]
    edges = draw(st.sets(st.sampled_from(pairs), max_size=len(pairs)))
    node_attrs = {}
    if attrs:
        for v in nodes:
            node_attrs[v] = draw(st.dictionaries(st.sampled_from("xy"), st.integers(-2, 2), max_size=2))
    return AttributedGraph(tuple(nodes), frozenset(edges), node_attrs, {})


@st.composite
def instances(draw, **cfg):
    """A (pattern, graph) pair from the seeded instance generator."""
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(random.Random(seed), InstanceConfig(**cfg))
