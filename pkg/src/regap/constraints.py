"""Attribute constraint expressions and their evaluator.

Node and edge constraints look at a single attribute map. Pair constraints
compare the attributes of two graph nodes, referenced by role ``"u"`` and
``"v"``. Evaluation is total: a missing attribute or a comparison between
values of different kinds is simply false.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Union

AttributeValue = Union[int, float, bool, str]

OPS = {
    "eq": operator.eq,
    "ne": operator.ne,
    "lt": operator.lt,
    "le": operator.le,
    "gt": operator.gt,
    "ge": operator.ge,
}


class ConstraintFormatError(ValueError):
    pass


def value_kind(value: Any) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    raise ConstraintFormatError(f"unsupported attribute value {value!r}")


def compare(left: Any, op: str, right: Any) -> bool:
    """Compare two attribute values; mixed kinds are never comparable."""
    if value_kind(left) != value_kind(right):
        return False
    if value_kind(left) == "bool" and op not in ("eq", "ne"):
        return False
    return bool(OPS[op](left, right))


@dataclass(frozen=True)
class TrueC:
    pass


@dataclass(frozen=True)
class Compare:
    attr: str
    op: str
    value: AttributeValue


@dataclass(frozen=True)
class Has:
    attr: str


@dataclass(frozen=True)
class Ref:
    role: str  # "u" or "v"
    attr: str


@dataclass(frozen=True)
class Lit:
    value: AttributeValue


@dataclass(frozen=True)
class PairCompare:
    left: Union[Ref, Lit]
    op: str
    right: Union[Ref, Lit]


@dataclass(frozen=True)
class PairHas:
    role: str
    attr: str


@dataclass(frozen=True)
class And:
    args: tuple = ()


@dataclass(frozen=True)
class Or:
    args: tuple = ()


@dataclass(frozen=True)
class Not:
    arg: Any


ConstraintExpr = Union[TrueC, Compare, Has, And, Or, Not]
PairConstraintExpr = Union[TrueC, PairCompare, PairHas, And, Or, Not]

TRUE = TrueC()

_MISSING = object()


def _evaluate(expr, lookup: Callable[[str | None, str], Any]) -> bool:
    if isinstance(expr, TrueC):
        return True
    if isinstance(expr, And):
        return all(_evaluate(a, lookup) for a in expr.args)
    if isinstance(expr, Or):
        return any(_evaluate(a, lookup) for a in expr.args)
    if isinstance(expr, Not):
        return not _evaluate(expr.arg, lookup)
    if isinstance(expr, Compare):
        got = lookup(None, expr.attr)
        return got is not _MISSING and compare(got, expr.op, expr.value)
    if isinstance(expr, Has):
        return lookup(None, expr.attr) is not _MISSING
    if isinstance(expr, PairHas):
        return lookup(expr.role, expr.attr) is not _MISSING
    if isinstance(expr, PairCompare):
        sides = []
        for side in (expr.left, expr.right):
            if isinstance(side, Lit):
                sides.append(side.value)
            else:
                sides.append(lookup(side.role, side.attr))
        if _MISSING in sides:
            return False
        return compare(sides[0], expr.op, sides[1])
    raise TypeError(f"not a constraint expression: {expr!r}")


def eval_node_constraint(c: ConstraintExpr, attrs: Mapping[str, Any]) -> bool:
    return _evaluate(c, lambda _role, name: attrs.get(name, _MISSING))


# Edge constraints share the node-constraint grammar.
eval_edge_constraint = eval_node_constraint


def eval_pair_constraint(
    c: PairConstraintExpr, attrs_u: Mapping[str, Any], attrs_v: Mapping[str, Any]
) -> bool:
    def lookup(role, name):
        if role == "u":
            return attrs_u.get(name, _MISSING)
        if role == "v":
            return attrs_v.get(name, _MISSING)
        return _MISSING

    return _evaluate(c, lookup)


def is_trivially_true(c) -> bool:
    return c is None or isinstance(c, TrueC) or (isinstance(c, And) and not c.args)


# --- JSON (de)serialization -------------------------------------------------


def _check_op(op):
    if op not in OPS:
        raise ConstraintFormatError(f"unknown comparison operator {op!r}")
    return op


def _check_value(value):
    value_kind(value)
    return value


def parse_constraint(doc: Any, pair: bool = False):
    """Parse the JSON form of a node/edge constraint (or a pair constraint)."""
    if not isinstance(doc, dict) or "op" not in doc:
        raise ConstraintFormatError(f"constraint must be an object with 'op': {doc!r}")
    op = doc["op"]
    if op == "true":
        return TRUE
    if op in ("and", "or"):
        args = doc.get("args")
        if not isinstance(args, list):
            raise ConstraintFormatError(f"'{op}' needs an 'args' list")
        parsed = tuple(parse_constraint(a, pair) for a in args)
        return And(parsed) if op == "and" else Or(parsed)
    if op == "not":
        if "arg" not in doc:
            raise ConstraintFormatError("'not' needs an 'arg'")
        return Not(parse_constraint(doc["arg"], pair))
    if op == "has":
        if pair:
            return PairHas(_role(doc.get("node")), _attr(doc))
        return Has(_attr(doc))
    _check_op(op)
    if pair:
        return PairCompare(_side(doc.get("left")), op, _side(doc.get("right")))
    if "value" not in doc:
        raise ConstraintFormatError(f"comparison needs a 'value': {doc!r}")
    return Compare(_attr(doc), op, _check_value(doc["value"]))


def _attr(doc):
    name = doc.get("attr")
    if not isinstance(name, str):
        raise ConstraintFormatError(f"missing attribute name in {doc!r}")
    return name


def _role(role):
    if role not in ("u", "v"):
        raise ConstraintFormatError(f"pair reference role must be 'u' or 'v', got {role!r}")
    return role


def _side(doc):
    if not isinstance(doc, dict):
        raise ConstraintFormatError(f"bad comparison side {doc!r}")
    if "node" in doc:
        return Ref(_role(doc["node"]), _attr(doc))
    if "value" in doc:
        return Lit(_check_value(doc["value"]))
    raise ConstraintFormatError(f"bad comparison side {doc!r}")


def dump_constraint(expr) -> dict:
    if isinstance(expr, TrueC):
        return {"op": "true"}
    if isinstance(expr, (And, Or)):
        return {"op": "and" if isinstance(expr, And) else "or",
                "args": [dump_constraint(a) for a in expr.args]}
    if isinstance(expr, Not):
        return {"op": "not", "arg": dump_constraint(expr.arg)}
    if isinstance(expr, Has):
        return {"op": "has", "attr": expr.attr}
    if isinstance(expr, PairHas):
        return {"op": "has", "node": expr.role, "attr": expr.attr}
    if isinstance(expr, Compare):
        return {"op": expr.op, "attr": expr.attr, "value": expr.value}
    if isinstance(expr, PairCompare):
        return {"op": expr.op, "left": _dump_side(expr.left), "right": _dump_side(expr.right)}
    raise TypeError(f"not a constraint expression: {expr!r}")


def _dump_side(side):
    if isinstance(side, Ref):
        return {"node": side.role, "attr": side.attr}
    return {"value": side.value}
