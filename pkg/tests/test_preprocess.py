import logging
import random

import pytest
from hypothesis import given, settings

from regap.constraints import Compare, Has
from regap.encode import EncodeOptions
from regap.gen import InstanceConfig, random_instance
from regap.graph import WildcardKind, make_graph, make_pattern
from regap.match import match
from regap.oracle import oracle_match
from regap.preprocess import MergeError, merge_fixpoint, merge_once, mergeable_edges
from regap.samples import guarded_branch, guarded_chain, guarded_pattern

from conftest import graphs
from reference import isomorphic

log = logging.getLogger(__name__)


def test_mergeable_guarded_chain():
    assert mergeable_edges(guarded_chain(), guarded_pattern()) == {("v2", "v3")}


def test_mergeable_branch():
    assert mergeable_edges(guarded_branch(), guarded_pattern()) == set()


def test_mergeable_all_visible():
    p = make_pattern([("A", "S")], kinds={"S": WildcardKind.SEQ0PLUS})  # A accepts every node
    assert mergeable_edges(make_graph([("a", "b"), ("b", "c")]), p) == set()


def test_mergeable_rejects_wildcard_edges():
    p = make_pattern([("S", "G")], kinds={"S": WildcardKind.SEQ1PLUS, "G": WildcardKind.SUB0PLUS})
    with pytest.raises(MergeError):
        mergeable_edges(make_graph([("a", "b")]), p)


_HAS_X = make_pattern([("A", "S")], kinds={"S": WildcardKind.SEQ1PLUS}, node_constraints={"A": Has("x")})


def test_merge_once_chain():
    g = make_graph([("a", "b"), ("b", "c")], edge_attrs={("a", "b"): {"w": 1}, ("b", "c"): {"w": 2}})
    out = merge_once(g, ("b", "c"), _HAS_X)
    assert out.nodes == ("a", "c")
    assert out.edges == {("a", "c")}
    assert out.edge_attrs[("a", "c")] == {"w": 1}


def test_merge_once_guarded_chain():
    out = merge_once(guarded_chain(), ("v2", "v3"), guarded_pattern())
    assert out.nodes == ("v1", "v3", "v4")
    assert out.edges == {("v1", "v3"), ("v3", "v4")}
    assert out.node_attrs["v3"] == {"x": 2}


def test_merge_once_source():
    out = merge_once(make_graph([("a", "b"), ("b", "c")]), ("a", "b"), _HAS_X)
    assert out.nodes == ("b", "c")
    assert out.edges == {("b", "c")}


def test_merge_once_rejects():
    with pytest.raises(MergeError):
        merge_once(guarded_branch(), ("v2", "v3"), guarded_pattern())
    with pytest.raises(MergeError):
        merge_once(guarded_chain(), ("v1", "v3"), guarded_pattern())


def test_fixpoint_interior_chain():
    nodes = ["s", "i1", "i2", "i3", "i4", "i5", "t"]
    attrs = {"s": {"x": -1}, "t": {"x": 0}}
    g = make_graph(zip(nodes, nodes[1:]), node_attrs=attrs)
    out, report = merge_fixpoint(g, guarded_pattern())
    assert len(out.nodes) == 3
    assert report.nodes_before - report.nodes_after == len(report.merged_pairs) == 4


def test_fixpoint_nothing_to_merge():
    g = guarded_branch()
    out, report = merge_fixpoint(g, guarded_pattern())
    assert out == g
    assert report.applied
    assert report.merged_pairs == []


def test_fixpoint_wildcard_edge_guard():
    p = make_pattern([("S", "G")], kinds={"S": WildcardKind.SEQ1PLUS, "G": WildcardKind.SUB0PLUS})
    g = make_graph([("a", "b"), ("b", "c")])
    out, report = merge_fixpoint(g, p)
    assert out == g
    assert not report.applied


@given(graphs())
def test_fixpoint_shrinks(g):
    out, report = merge_fixpoint(g, _HAS_X)
    assert report.nodes_after <= report.nodes_before
    assert report.nodes_before - report.nodes_after == len(report.merged_pairs)
    assert mergeable_edges(out, _HAS_X) == set()


def _instances(seed, count):
    rng = random.Random(seed)
    cfg = InstanceConfig(allow_wildcard_edges=False)
    return [random_instance(rng, cfg) for _ in range(count)]


@pytest.mark.parametrize("seed", range(3))
def test_merge_preserves_outcome(seed):
    for p, g in _instances(seed, 40):
        merged, report = merge_fixpoint(g, p)
        if not report.merged_pairs:
            continue
        before = oracle_match(p, g, timeout=10)
        after = oracle_match(p, merged, timeout=10)
        if "unknown" not in (before.status, after.status):
            assert before.status == after.status
        on = match(p, g, EncodeOptions(merge=True)).status
        off = match(p, g, EncodeOptions(merge=False)).status
        assert on == off


@settings(max_examples=30)
@given(graphs(attrs=False))
def test_merge_order_confluence(g):
    # Not a theorem: differences are logged, never failed on.
    out, _ = merge_fixpoint(g, _HAS_X)
    h = g
    while True:
        cands = sorted(mergeable_edges(h, _HAS_X), reverse=True)
        if not cands:
            break
        h = merge_once(h, cands[0], _HAS_X)
    if not isomorphic(out, h):
        log.warning("merge order changed the result on %s", sorted(g.edges))
