import pytest
from hypothesis import given
from hypothesis import strategies as st

from regap.constraints import (
    TRUE,
    And,
    Compare,
    ConstraintFormatError,
    Has,
    Lit,
    Not,
    Or,
    PairCompare,
    PairHas,
    Ref,
    dump_constraint,
    eval_edge_constraint,
    eval_node_constraint,
    eval_pair_constraint,
    parse_constraint,
)

values = st.one_of(st.integers(-3, 3), st.sampled_from([0.5, -1.5, True, False, "a", "b"]))
attr_maps = st.dictionaries(st.sampled_from("xyz"), values, max_size=3)
ops = st.sampled_from(["eq", "ne", "lt", "le", "gt", "ge"])

leaves = st.one_of(
    st.just(TRUE),
    st.builds(Compare, st.sampled_from("xyz"), ops, values),
    st.builds(Has, st.sampled_from("xyz")),
)
exprs = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.builds(lambda a: And(tuple(a)), st.lists(kids, max_size=3)),
        st.builds(lambda a: Or(tuple(a)), st.lists(kids, max_size=3)),
        st.builds(Not, kids),
    ),
    max_leaves=8,
)
sides = st.one_of(st.builds(Ref, st.sampled_from("uv"), st.sampled_from("xyz")), st.builds(Lit, values))
pair_exprs = st.recursive(
    st.one_of(st.just(TRUE), st.builds(PairCompare, sides, ops, sides),
              st.builds(PairHas, st.sampled_from("uv"), st.sampled_from("xyz"))),
    lambda kids: st.one_of(st.builds(lambda a: And(tuple(a)), st.lists(kids, max_size=3)), st.builds(Not, kids)),
    max_leaves=6,
)


def test_node_examples():
    assert eval_node_constraint(Compare("x", "lt", 0), {"x": -1})
    assert not eval_node_constraint(Compare("x", "eq", 0), {"x": 1})
    assert eval_node_constraint(TRUE, {})


def test_edge_examples():
    assert eval_edge_constraint(TRUE, {"w": 1})
    assert eval_edge_constraint(Compare("w", "ge", 2), {"w": 3})
    assert not eval_edge_constraint(Has("label"), {})


def test_pair_examples():
    same = PairCompare(Ref("u", "x"), "eq", Ref("v", "x"))
    assert eval_pair_constraint(same, {"x": 1}, {"x": 1})
    assert not eval_pair_constraint(PairCompare(Ref("u", "x"), "lt", Ref("v", "x")), {"x": 2}, {"x": 1})
    assert eval_pair_constraint(TRUE, {}, {"x": 1})


def test_empty_connectives():
    assert eval_node_constraint(And(()), {})
    assert not eval_node_constraint(Or(()), {})


def test_missing_attribute_is_false():
    assert not eval_node_constraint(Compare("x", "ne", 0), {})
    assert not eval_pair_constraint(PairCompare(Ref("u", "x"), "ne", Lit(0)), {}, {"x": 1})


def test_mixed_kinds_never_compare():
    assert not eval_node_constraint(Compare("x", "eq", "1"), {"x": 1})
    assert not eval_node_constraint(Compare("x", "ne", "1"), {"x": 1})
    assert not eval_node_constraint(Compare("x", "eq", 1), {"x": True})
    assert eval_node_constraint(Compare("x", "eq", 1), {"x": 1.0})
    assert eval_node_constraint(Compare("s", "lt", "b"), {"s": "a"})


@pytest.mark.parametrize("doc", [{"op": "lt", "attr": "x"}, {"op": "zz"}, {"op": "and"}, [], {"op": "not"},
                                 {"op": "eq", "attr": "x", "value": [1]}])
def test_parse_errors(doc):
    with pytest.raises(ConstraintFormatError):
        parse_constraint(doc)


def test_parse_pair_refs():
    doc = {"op": "eq", "left": {"node": "u", "attr": "x"}, "right": {"node": "v", "attr": "x"}}
    assert parse_constraint(doc, pair=True) == PairCompare(Ref("u", "x"), "eq", Ref("v", "x"))
    with pytest.raises(ConstraintFormatError):
        parse_constraint({"op": "eq", "left": {"node": "w", "attr": "x"}, "right": {"value": 1}}, pair=True)


@given(exprs, attr_maps)
def test_double_negation(c, attrs):
    assert eval_node_constraint(Not(Not(c)), attrs) == eval_node_constraint(c, attrs)


@given(exprs, exprs, attr_maps)
def test_de_morgan(a, b, attrs):
    assert eval_node_constraint(Not(And((a, b))), attrs) == eval_node_constraint(Or((Not(a), Not(b))), attrs)


@given(exprs, attr_maps, attr_maps)
def test_only_named_attributes_matter(c, attrs, noise):
    # Attributes outside x, y, z are never consulted.
    extra = {f"q{k}": v for k, v in noise.items()}
    assert eval_node_constraint(c, {**attrs, **extra}) == eval_node_constraint(c, attrs)


@given(exprs)
def test_json_round_trip(c):
    assert parse_constraint(dump_constraint(c)) == c


@given(pair_exprs, attr_maps, attr_maps)
def test_pair_json_round_trip(c, au, av):
    back = parse_constraint(dump_constraint(c), pair=True)
    assert eval_pair_constraint(back, au, av) == eval_pair_constraint(c, au, av)
