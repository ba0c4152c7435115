import json

import pytest
from hypothesis import given

from regap.constraints import Compare
from regap.graph import (
    CONCRETE,
    GraphFormatError,
    WildcardKind,
    dumps,
    graph_to_dict,
    load_graph,
    load_pattern,
    make_graph,
    neighbors,
    pattern_to_dict,
)
from regap.samples import loop_graph, loop_pattern

from conftest import graphs, instances


def test_singleton_graph():
    g = load_graph('{"nodes":[{"id":"a"}],"edges":[]}')
    assert g.nodes == ("a",)
    assert not g.edges


def test_loop_graph_sizes():
    g = load_graph(dumps(loop_graph()))
    assert len(g.nodes) == 7
    assert len(g.edges) == 7


@pytest.mark.parametrize(
    "doc",
    [
        '{"nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"z"}]}',
        '{"nodes":[{"id":"a"},{"id":"a"}],"edges":[]}',
        '{"nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"a"},{"src":"a","dst":"a"}]}',
        '{"nodes":[{"id":"a"}]',
        "[]",
        '{"nodes":[{"id":"a","attrs":{"x":[1]}}],"edges":[]}',
    ],
    ids=["dangling", "duplicate-node", "duplicate-edge", "truncated", "not-object", "bad-value"],
)
def test_graph_errors(doc):
    with pytest.raises(GraphFormatError):
        load_graph(doc)


def test_self_loop_accepted():
    g = load_graph('{"nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"a"}]}')
    assert g.edges == {("a", "a")}


def test_loop_pattern():
    p = load_pattern(dumps(loop_pattern()))
    assert sorted(p.wildcards) == ["G", "S"]
    assert p.kind["S"] is WildcardKind.SEQ1PLUS
    assert p.kind["G"] is WildcardKind.SUB1PLUS
    assert p.kind["A"] == CONCRETE
    assert not p.has_wildcard_edge


def _pattern_doc(nodes, edges, **extra):
    return json.dumps({"nodes": nodes, "edges": edges, **extra})


def test_constraint_on_wildcard_rejected():
    doc = _pattern_doc([{"id": "s", "kind": "seq0plus", "constraint": {"op": "has", "attr": "x"}}], [])
    with pytest.raises(GraphFormatError):
        load_pattern(doc)


def test_pair_constraint_on_wildcard_rejected():
    pc = {"u": "a", "v": "s", "constraint": {"op": "true"}}
    doc = _pattern_doc([{"id": "a"}, {"id": "s", "kind": "sub1plus"}], [], pair_constraints=[pc])
    with pytest.raises(GraphFormatError):
        load_pattern(doc)


def test_unknown_kind_rejected():
    with pytest.raises(GraphFormatError):
        load_pattern(_pattern_doc([{"id": "s", "kind": "seq2plus"}], []))


def test_wildcard_edge_flag():
    doc = _pattern_doc([{"id": "a", "kind": "sub1plus"}, {"id": "b", "kind": "sub0plus"}],
                       [{"src": "a", "dst": "b"}])
    assert load_pattern(doc).has_wildcard_edge


def test_constraints_survive_round_trip():
    doc = _pattern_doc([{"id": "a", "constraint": {"op": "lt", "attr": "x", "value": 0}}, {"id": "b"}],
                       [{"src": "a", "dst": "b", "constraint": {"op": "has", "attr": "w"}}])
    p = load_pattern(doc)
    assert p.node_constraint("a") == Compare("x", "lt", 0)
    assert load_pattern(dumps(p)) == p


def test_neighbors_examples():
    g = loop_graph()
    assert neighbors(g, "v4", "out") == {"v5", "v6", "v7"}
    assert neighbors(make_graph([], nodes=["a"]), "a", "in") == set()
    assert neighbors(make_graph([], nodes=["a"]), "a", "out") == set()
    assert neighbors(make_graph([("a", "b"), ("b", "c")]), "b", "in") == {"a"}
    with pytest.raises(KeyError):
        neighbors(g, "zz", "in")


def test_floats_keep_their_kind():
    g = load_graph('{"nodes":[{"id":"a","attrs":{"x":1.5,"y":2,"z":true,"s":"t"}}],"edges":[]}')
    assert g.node_attrs["a"] == {"x": 1.5, "y": 2, "z": True, "s": "t"}


@given(graphs())
def test_graph_round_trip(g):
    assert load_graph(dumps(g)) == g
    assert load_graph(graph_to_dict(g)) == g


@given(instances())
def test_pattern_round_trip(inst):
    p, _ = inst
    assert load_pattern(dumps(p)) == p
    assert load_pattern(pattern_to_dict(p)) == p


@given(graphs(attrs=False))
def test_neighbors_match_scan(g):
    for v in g.nodes:
        assert neighbors(g, v, "out") == {b for a, b in g.edges if a == v}
        assert neighbors(g, v, "in") == {a for a, b in g.edges if b == v}
