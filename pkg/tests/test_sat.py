import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from regap.encode import encode
from regap.samples import loop_graph, loop_pattern
from regap.sat import (
    Budget,
    CnfFormula,
    DimacsError,
    FormulaError,
    amo,
    from_dimacs,
    parse_solver_output,
    satisfies,
    solve,
    to_dimacs,
)

from reference import dpll


def random_3cnf(rng, n, m):
    return [[v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)] for _ in range(m)]


def test_unit_chain():
    out = solve(CnfFormula(2, [[1], [-1, 2]]))
    assert out.is_sat
    assert out.model == {1: True, 2: True}


def test_contradiction():
    assert solve(CnfFormula(1, [[1], [-1]])).is_unsat


def test_malformed_formula():
    with pytest.raises(FormulaError):
        solve(CnfFormula(1, [[2]]))
    with pytest.raises(FormulaError):
        CnfFormula(1).add([])


def test_budget_exhaustion():
    rng = random.Random(0)
    f = CnfFormula(100, random_3cnf(rng, 100, 426))
    assert solve(f, Budget(conflicts=1)).status == "UNKNOWN"
    assert solve(f, Budget(seconds=0)).status == "UNKNOWN"


@pytest.mark.parametrize("seed", range(10))
def test_agrees_with_dpll_small(seed):
    rng = random.Random(seed)
    clauses = random_3cnf(rng, 30, 128)
    out = solve(CnfFormula(30, clauses))
    assert out.is_sat == (dpll(clauses) is not None)
    if out.is_sat:
        assert satisfies(clauses, out.model)
        assert set(out.model) == set(range(1, 31))


def test_deterministic_under_seed():
    f = CnfFormula(60, random_3cnf(random.Random(3), 60, 240))
    assert solve(f, seed=5) == solve(f, seed=5)


# --- DIMACS -------------------------------------------------------------------------


def test_dimacs_minimal():
    assert to_dimacs(CnfFormula(1, [[1]])) == b"p cnf 1 1\n1 0\n"


def test_dimacs_round_trip_encoding():
    f = encode(loop_pattern(), loop_graph()).formula
    assert from_dimacs(to_dimacs(f)) == f


@pytest.mark.parametrize(
    "text",
    ["p cnf 2 2\n1 0\n", "p cnf 1 1\n2 0\n", "1 0\n", "p cnf 1 1\n1\n", "p cnf x 1\n1 0\n", "p cnf 1 1\n0\n",
     "p cnf 1 1\n1 0\np cnf 1 1\n", "c only\n"],
    ids=["count", "range", "no-header", "unterminated", "bad-header", "empty-clause", "two-headers", "missing"],
)
def test_dimacs_errors(text):
    with pytest.raises(DimacsError):
        from_dimacs(text)


def test_dimacs_comments_and_wrapping():
    f = from_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1\n0\n")
    assert f.clauses == [[1, -2, 3], [-1]]


clause_lists = st.integers(1, 6).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4),
                 max_size=12),
    )
)


@given(clause_lists)
def test_dimacs_round_trip(data):
    n, clauses = data
    f = CnfFormula(n, clauses)
    assert from_dimacs(to_dimacs(f)) == f


@given(clause_lists)
def test_solver_vs_enumeration(data):
    n, clauses = data
    brute = any(
        satisfies(clauses, {i + 1: b for i, b in enumerate(bits)})
        for bits in itertools.product((False, True), repeat=n)
    )
    assert solve(CnfFormula(n, clauses)).is_sat == brute


# --- external solver output ----------------------------------------------------------------


def test_parse_plain_output():
    f = CnfFormula(2, [[1], [-2]])
    assert parse_solver_output("SAT\n1 -2 0\n", f).model == {1: True, 2: False}
    assert parse_solver_output("UNSAT\n", f).is_unsat


def test_parse_competition_output():
    f = CnfFormula(2, [[1], [-2]])
    out = parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2 0\n", f)
    assert out.model == {1: True, 2: False}
    assert parse_solver_output("s UNSATISFIABLE\n", f).is_unsat
    assert parse_solver_output("garbage\n", f).status == "UNKNOWN"


def test_parse_rejects_wrong_model():
    with pytest.raises(AssertionError):
        parse_solver_output("SAT\n-1 0\n", CnfFormula(1, [[1]]))


# --- at-most-one -----------------------------------------------------------------------


def projected_models(n, strategy):
    lits = list(range(1, n + 1))
    f = CnfFormula(n)
    f.extend(amo(lits, strategy, f.new_var))
    seen = set()
    for bits in itertools.product((False, True), repeat=f.num_vars):
        model = {i + 1: b for i, b in enumerate(bits)}
        if satisfies(f.clauses, model):
            seen.add(bits[:n])
    return f, seen


def test_amo_counts():
    assert len(amo([1, 2, 3], "pairwise")) == 3
    assert amo([1], "sequential", lambda: 99) == []
    assert amo([], "pairwise") == []
    with pytest.raises(ValueError):
        amo([1, 1], "pairwise")
    with pytest.raises(ValueError):
        amo([1, 2], "ladder")


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("strategy", ["pairwise", "sequential"])
def test_amo_exact(n, strategy):
    f, seen = projected_models(n, strategy)
    assert seen == {b for b in itertools.product((False, True), repeat=n) if sum(b) <= 1}
    assert len(seen) == n + 1
    if strategy == "pairwise":
        assert len(f.clauses) == n * (n - 1) // 2 and f.num_vars == n
    elif n >= 2:
        assert len(f.clauses) == 3 * n - 4 and f.num_vars == 2 * n - 1
