"""End-to-end matching: merge, encode, solve, decode and check."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .encode import EncodeOptions, Encoding, encode
from .graph import AttributedGraph, ReGaP
from .sat import Budget, SolveOutcome, solve, solve_external
from .witness import MatchWitness, WitnessError, check_witness, decode_model, lift_witness

MATCH, NO_MATCH, UNKNOWN = "MATCH", "NO-MATCH", "UNKNOWN"


@dataclass
class MatchResult:
    status: str
    witness: Optional[MatchWitness] = None
    encoding: Optional[Encoding] = None
    outcome: Optional[SolveOutcome] = None
    timings: dict = field(default_factory=dict)

    @property
    def matched(self) -> Optional[bool]:
        return None if self.status == UNKNOWN else self.status == MATCH


def run_solver(enc: Encoding, budget: Budget, solver: str = "builtin", seed: int = 0) -> SolveOutcome:
    """``solver`` is ``builtin`` or ``external:COMMAND``."""
    if solver == "builtin":
        return solve(enc.formula, budget, seed)
    if solver.startswith("external:"):
        return solve_external(enc.formula, solver[len("external:"):], budget)
    raise ValueError(f"unknown solver {solver!r}")


def match(
    p: ReGaP,
    g: AttributedGraph,
    options: EncodeOptions | None = None,
    timeout: Optional[float] = None,
    solver: str = "builtin",
    seed: int = 0,
) -> MatchResult:
    """Decide whether ``p`` matches ``g``; a found witness is always re-checked."""
    t0 = time.perf_counter()
    enc = encode(p, g, options)
    t1 = time.perf_counter()
    remaining = None if timeout is None else max(0.0, timeout - (t1 - t0))
    if remaining == 0.0:
        out = SolveOutcome("UNKNOWN", reason="time limit")
    else:
        out = run_solver(enc, Budget(seconds=remaining), solver, seed)
    t2 = time.perf_counter()
    timings = {"encode": t1 - t0, "solve": t2 - t1}
    if out.is_unsat:
        return MatchResult(NO_MATCH, None, enc, out, timings)
    if not out.is_sat:
        return MatchResult(UNKNOWN, None, enc, out, timings)
    w = lift_witness(decode_model(out.model, enc), enc.merge_report.merged_pairs, p)
    problems = check_witness(p, g, w)
    if problems:
        raise WitnessError("; ".join(problems))
    return MatchResult(MATCH, w, enc, out, timings)
