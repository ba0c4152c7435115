"""CNF formulas, a small CDCL solver, DIMACS I/O and at-most-one encodings."""

from __future__ import annotations

import heapq
import itertools
import os
import random
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence


class DimacsError(ValueError):
    pass


class FormulaError(ValueError):
    pass


@dataclass
class CnfFormula:
    num_vars: int = 0
    clauses: list = field(default_factory=list)

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add(self, clause: Iterable[int]) -> None:
        clause = list(clause)
        if not clause:
            raise FormulaError("empty clause")
        self.clauses.append(clause)

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add(c)

    def validate(self) -> None:
        for c in self.clauses:
            if not c:
                raise FormulaError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise FormulaError(f"literal {lit} out of range 1..{self.num_vars}")

    def tautologies(self) -> int:
        return sum(1 for c in self.clauses if any(-lit in c for lit in c))

    def __eq__(self, other):
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return self.num_vars == other.num_vars and [list(c) for c in self.clauses] == [
            list(c) for c in other.clauses
        ]


def satisfies(clauses: Iterable[Sequence[int]], model: dict) -> bool:
    """Clause-level check of a model (var -> bool)."""
    for c in clauses:
        if not any(model.get(abs(lit), False) == (lit > 0) for lit in c):
            return False
    return True


# --- outcomes ----------------------------------------------------------------


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "SAT", "UNSAT" or "UNKNOWN"
    model: Optional[dict] = None
    reason: str = ""
    conflicts: int = 0

    @property
    def is_sat(self):
        return self.status == "SAT"

    @property
    def is_unsat(self):
        return self.status == "UNSAT"


@dataclass(frozen=True)
class Budget:
    conflicts: Optional[int] = None
    seconds: Optional[float] = None


# --- CDCL ----------------------------------------------------------------------


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class _Solver:
    # Literal encoding: var v -> 2v (positive), 2v+1 (negative).

    def __init__(self, formula: CnfFormula, seed: int = 0):
        n = formula.num_vars
        self.n = n
        self.value = [0] * (2 * n + 2)  # per literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.watches = [[] for _ in range(2 * n + 2)]
        self.clauses: list = []
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.phase = [False] * (n + 1)
        rng = random.Random(seed)
        self.heap = [(0.0, rng.random(), v) for v in range(1, n + 1)]
        heapq.heapify(self.heap)
        self.conflicts = 0
        self.unsat = False
        for c in formula.clauses:
            lits = sorted({self._lit(x) for x in c})
            if any(l ^ 1 in lits for l in lits):
                continue  # tautology
            if not self._add_clause(lits):
                self.unsat = True
                break

    @staticmethod
    def _lit(x: int) -> int:
        return 2 * x if x > 0 else 2 * (-x) + 1

    def _add_clause(self, lits) -> bool:
        if len(lits) == 1:
            val = self.value[lits[0]]
            if val == -1:
                return False
            if val == 0:
                self._assign(lits[0], None)
            return True
        idx = len(self.clauses)
        self.clauses.append(list(lits))
        self.watches[lits[0] ^ 1].append(idx)
        self.watches[lits[1] ^ 1].append(idx)
        return True

    def _assign(self, lit, reason):
        v = lit >> 1
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        value = self.value
        clauses = self.clauses
        watches = self.watches
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]  # lit became true; visit clauses watching its negation
            self.qhead += 1
            false_lit = lit ^ 1
            ws = watches[lit]
            i = j = 0
            while i < len(ws):
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if value[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if value[c[k]] != -1:
                        c[1], c[k] = c[k], c[1]
                        watches[c[1] ^ 1].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if value[first] == -1:
                        while i < len(ws):
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    self._assign(first, ci)
            del ws[j:]
        return None

    def _bump(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], 0.0, u) for u in range(1, self.n + 1) if self.value[2 * u] == 0]
            heapq.heapify(self.heap)
            return
        heapq.heappush(self.heap, (-self.activity[v], 0.0, v))

    def _analyze(self, confl):
        learnt = [None]
        seen = [False] * (self.n + 1)
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        clause = self.clauses[confl]
        while True:
            for q in clause:
                if p is not None and q == p:
                    continue
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[v]]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            back = 0
        else:
            best = max(range(1, len(learnt)), key=lambda i: self.level[learnt[i] >> 1])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = self.level[learnt[1] >> 1]
        self.var_inc /= 0.95
        return learnt, back

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for lit in reversed(self.trail[stop:]):
            v = lit >> 1
            self.phase[v] = (lit & 1) == 0
            self.value[lit] = 0
            self.value[lit ^ 1] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], 0.0, v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _decide(self):
        while self.heap:
            _, _, v = heapq.heappop(self.heap)
            if self.value[2 * v] == 0:
                return 2 * v if self.phase[v] else 2 * v + 1
        return None

    def solve(self, budget: Budget) -> SolveOutcome:
        if self.unsat:
            return SolveOutcome("UNSAT")
        deadline = None if budget.seconds is None else time.monotonic() + budget.seconds
        restart_no = 1
        limit = 100 * luby(restart_no)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return SolveOutcome("UNSAT", conflicts=self.conflicts)
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0] ^ 1].append(idx)
                    self.watches[learnt[1] ^ 1].append(idx)
                    self._assign(learnt[0], idx)
                if budget.conflicts is not None and self.conflicts >= budget.conflicts:
                    return SolveOutcome("UNKNOWN", reason="conflict limit", conflicts=self.conflicts)
                if deadline is not None and (self.conflicts & 63) == 0 and time.monotonic() > deadline:
                    return SolveOutcome("UNKNOWN", reason="time limit", conflicts=self.conflicts)
                continue
            if since_restart >= limit:
                restart_no += 1
                limit = 100 * luby(restart_no)
                since_restart = 0
                self._backtrack(0)
                continue
            if deadline is not None and time.monotonic() > deadline:
                return SolveOutcome("UNKNOWN", reason="time limit", conflicts=self.conflicts)
            lit = self._decide()
            if lit is None:
                model = {v: self.value[2 * v] == 1 for v in range(1, self.n + 1)}
                return SolveOutcome("SAT", model=model, conflicts=self.conflicts)
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)


def solve(f: CnfFormula, budget: Budget | None = None, seed: int = 0) -> SolveOutcome:
    """Decide satisfiability of ``f``; SAT models are re-checked clause by clause."""
    f.validate()
    budget = budget or Budget()
    if budget.seconds is not None and budget.seconds <= 0:
        return SolveOutcome("UNKNOWN", reason="time limit")
    outcome = _Solver(f, seed).solve(budget)
    if outcome.is_sat and not satisfies(f.clauses, outcome.model):
        raise AssertionError("solver produced a model that violates the formula")
    return outcome


def solve_external(f: CnfFormula, command: str, budget: Budget | None = None) -> SolveOutcome:
    """Run an external solver: it gets a DIMACS file path and must print
    ``SAT`` followed by the model literals, or ``UNSAT``."""
    budget = budget or Budget()
    with tempfile.NamedTemporaryFile("wb", suffix=".cnf", delete=False) as fh:
        fh.write(to_dimacs(f))
        path = fh.name
    try:
        proc = subprocess.run([command, path], capture_output=True, text=True, timeout=budget.seconds)
    except subprocess.TimeoutExpired:
        return SolveOutcome("UNKNOWN", reason="time limit")
    finally:
        os.unlink(path)
    return parse_solver_output(proc.stdout, f)


def parse_solver_output(text: str, f: CnfFormula) -> SolveOutcome:
    """Accept either ``SAT``/``UNSAT`` followed by literals, or the usual
    ``s SATISFIABLE`` / ``v ...`` competition format."""
    status, lits = None, []
    for ln in text.splitlines():
        parts = ln.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            parts = parts[1:]
        elif parts[0] == "v":
            lits.extend(parts[1:])
            continue
        word = parts[0].upper() if parts else ""
        if status is None and word in ("SAT", "SATISFIABLE", "UNSAT", "UNSATISFIABLE"):
            status = "UNSAT" if word.startswith("UNSAT") else "SAT"
            lits.extend(parts[1:])
        elif status == "SAT":
            lits.extend(parts)
    if status is None:
        return SolveOutcome("UNKNOWN", reason="no recognisable solver output")
    if status == "UNSAT":
        return SolveOutcome("UNSAT")
    model = {v: False for v in range(1, f.num_vars + 1)}
    for tok in lits:
        lit = int(tok)
        if lit != 0:
            model[abs(lit)] = lit > 0
    if not satisfies(f.clauses, model):
        raise AssertionError("external solver model violates the formula")
    return SolveOutcome("SAT", model=model)


# --- DIMACS ------------------------------------------------------------------


def to_dimacs(f: CnfFormula) -> bytes:
    f.validate()
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return ("\n".join(lines) + "\n").encode("ascii")


def from_dimacs(data) -> CnfFormula:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("ascii")
    header = None
    lits: list = []
    clauses: list = []
    for lineno, line in enumerate(data.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if header is not None or len(fields) != 4 or fields[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: bad header {line!r}") from exc
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: non-integer token {tok!r}") from exc
            if lit == 0:
                if not lits:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(lits)
                lits = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError(f"line {lineno}: literal {lit} out of range")
                lits.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if lits:
        raise DimacsError("last clause is not 0-terminated")
    if len(clauses) != header[1]:
        raise DimacsError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], clauses)


# --- cardinality ---------------------------------------------------------------

PAIRWISE_MAX = 8


def amo(lits: Sequence[int], strategy: str = "auto", fresh: Callable[[], int] | None = None) -> list:
    """Clauses enforcing that at most one of ``lits`` is true.

    ``pairwise`` emits n(n-1)/2 binary clauses. ``sequential`` is the ladder
    (Sinz) encoding with n-1 auxiliaries from ``fresh`` and 3n-4 clauses.
    ``auto`` picks pairwise up to 8 literals.
    """
    lits = list(lits)
    if len(set(lits)) != len(lits):
        raise ValueError("amo literals must be distinct")
    n = len(lits)
    if n <= 1:
        return []
    if strategy == "auto":
        strategy = "pairwise" if n <= PAIRWISE_MAX else "sequential"
    if strategy == "pairwise":
        return [[-a, -b] for a, b in itertools.combinations(lits, 2)]
    if strategy != "sequential":
        raise ValueError(f"unknown amo strategy {strategy!r}")
    if fresh is None:
        raise ValueError("sequential amo needs a fresh-variable source")
    s = [fresh() for _ in range(n - 1)]
    clauses = [[-lits[0], s[0]], [-lits[-1], -s[-1]]]
    for i in range(1, n - 1):
        clauses.append([-lits[i], s[i]])
        clauses.append([-s[i - 1], s[i]])
        clauses.append([-lits[i], -s[i - 1]])
    return clauses
