"""Brute-force matcher that applies the generalization rules literally.

A generalized graph has concrete nodes (one graph node each), non-empty
wildcards (the graph nodes they absorbed) and empty any-0+ placeholders.
Each edge remembers the graph edges it stands for; a pattern edge
constraint must hold on all of them.

The fourteen rules, applied in nondecreasing index order:

 1. concrete u -> S+ or G+
 2. u -> S+ where u has no other successor and S+ no other predecessor:
    prepend u to the sequence
 3. A1 -> A2  =>  A1 -> * -> A2 (new empty placeholder, typed S* or G*)
 4. S*, S* -> S*            5. *, G* -> G*
 6. +, W -> G+ (W a non-empty wildcard)
 7. A without successors => A -> *
 8. A without predecessors => * -> A
 9. S*, S* without successors -> S*     10. same without predecessors
11. G*, * without successors -> G*      12. same without predecessors
13. S+ -> S*                            14. G+ -> G*

P matches G when some rule sequence yields a graph isomorphic to P
(same wildcard types, concrete nodes satisfying their constraints).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from .constraints import eval_edge_constraint, eval_node_constraint, eval_pair_constraint
from .graph import CONCRETE, AttributedGraph, ReGaP, WildcardKind

C, SP, GP, SS, GS = "C", "S+", "G+", "S*", "G*"
KIND_OF = {
    WildcardKind.SEQ1PLUS: SP,
    WildcardKind.SUB1PLUS: GP,
    WildcardKind.SEQ0PLUS: SS,
    WildcardKind.SUB0PLUS: GS,
}
RULE_COUNT = 14


class RuleError(ValueError):
    """A rule was applied where its left-hand side does not match."""


@dataclass(frozen=True)
class GNode:
    kind: str
    contents: tuple  # graph nodes; ordered for sequences, sorted otherwise

    @property
    def empty(self) -> bool:
        return not self.contents


@dataclass(frozen=True)
class GenGraph:
    nodes: dict  # id -> GNode
    edges: dict  # (id, id) -> frozenset of graph edges
    next_id: int

    def __post_init__(self):
        out = {n: set() for n in self.nodes}
        inn = {n: set() for n in self.nodes}
        for a, b in self.edges:
            out[a].add(b)
            inn[b].add(a)
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inn)

    def succ(self, n) -> set:
        return self._out[n]

    def pred(self, n) -> set:
        return self._in[n]


def initial_state(g: AttributedGraph) -> GenGraph:
    ids = {v: i for i, v in enumerate(g.nodes)}
    nodes = {ids[v]: GNode(C, (v,)) for v in g.nodes}
    edges = {(ids[u], ids[v]): frozenset([(u, v)]) for u, v in g.edges}
    return GenGraph(nodes, edges, len(g.nodes))


def _merge(s: GenGraph, keep, gone, node: GNode, internal: str) -> GenGraph:
    """Fuse ``gone`` into ``keep``; internal edges are dropped or become a self-loop."""
    nodes = dict(s.nodes)
    del nodes[gone]
    nodes[keep] = node
    edges = {}
    for (a, b), under in s.edges.items():
        a2 = keep if a == gone else a
        b2 = keep if b == gone else b
        if a2 == keep and b2 == keep and internal == "drop":
            continue
        edges[(a2, b2)] = edges.get((a2, b2), frozenset()) | under
    return GenGraph(nodes, edges, s.next_id)


def _need(cond, msg):
    if not cond:
        raise RuleError(msg)


def apply_rule(s: GenGraph, rule: int, args: tuple) -> GenGraph:
    """Apply one rule instance; raises RuleError if it is not applicable."""
    nodes, edges = s.nodes, s.edges
    for n in args:
        if isinstance(n, int):
            _need(n in nodes, f"rule {rule}: unknown node {n}")
    if rule == 1:
        u, kind = args
        _need(nodes[u].kind == C and kind in (SP, GP), "rule 1 needs a concrete node")
        new = dict(nodes)
        new[u] = GNode(kind, nodes[u].contents)
        return GenGraph(new, dict(edges), s.next_id)
    if rule == 2:
        u, w = args
        _need(nodes[u].kind == C and nodes[w].kind == SP, "rule 2 needs u -> S+")
        _need(s.succ(u) == {w}, "rule 2: u has another successor")
        _need(s.pred(w) == {u}, "rule 2: S+ has another predecessor")
        node = GNode(SP, nodes[u].contents + nodes[w].contents)
        nodes2 = dict(nodes)
        del nodes2[u]
        nodes2[w] = node
        new_edges = {}
        for (a, b), under in edges.items():
            if (a, b) == (u, w):
                continue  # the consumed path edge
            e = (w if a == u else a, w if b == u else b)
            new_edges[e] = new_edges.get(e, frozenset()) | under
        return GenGraph(nodes2, new_edges, s.next_id)
    if rule == 3:
        a, b, kind = args
        _need((a, b) in edges and kind in (SS, GS), "rule 3 needs an edge")
        x = s.next_id
        new = dict(nodes)
        new[x] = GNode(kind, ())
        e2 = dict(edges)
        under = e2.pop((a, b))
        e2[(a, x)] = under
        e2[(x, b)] = under
        return GenGraph(new, e2, x + 1)
    if rule in (4, 9, 10):
        a, b = args
        _need(a != b and nodes[a].kind == SS and nodes[b].kind == SS, f"rule {rule} needs two S*")
        if rule == 9:
            _need(not s.succ(a) and not s.succ(b), "rule 9 needs nodes without successors")
        if rule == 10:
            _need(not s.pred(a) and not s.pred(b), "rule 10 needs nodes without predecessors")
        keep, gone = min(a, b), max(a, b)
        node = GNode(SS, nodes[keep].contents + nodes[gone].contents)
        return _merge(s, keep, gone, node, "loop")
    if rule in (5, 11, 12):
        a, w = args
        _need(a != w and nodes[w].kind == GS and nodes[a].kind in (SS, GS), f"rule {rule} needs * and G*")
        if rule == 11:
            _need(not s.succ(a) and not s.succ(w), "rule 11 needs nodes without successors")
        if rule == 12:
            _need(not s.pred(a) and not s.pred(w), "rule 12 needs nodes without predecessors")
        keep, gone = min(a, w), max(a, w)
        node = GNode(GS, tuple(sorted(nodes[a].contents + nodes[w].contents)))
        return _merge(s, keep, gone, node, "drop")
    if rule == 6:
        a, w = args
        _need(a != w and nodes[a].kind in (SP, GP), "rule 6 needs a 1+ wildcard")
        _need(nodes[w].kind != C and not nodes[w].empty, "rule 6 needs a non-empty wildcard")
        keep, gone = min(a, w), max(a, w)
        node = GNode(GP, tuple(sorted(nodes[a].contents + nodes[w].contents)))
        return _merge(s, keep, gone, node, "drop")
    if rule in (7, 8):
        a, kind = args
        _need(kind in (SS, GS), f"rule {rule} creates a 0+ placeholder")
        x = s.next_id
        new = dict(nodes)
        new[x] = GNode(kind, ())
        e2 = dict(edges)
        if rule == 7:
            _need(not s.succ(a), "rule 7 needs a node without successors")
            e2[(a, x)] = frozenset()
        else:
            _need(not s.pred(a), "rule 8 needs a node without predecessors")
            e2[(x, a)] = frozenset()
        return GenGraph(new, e2, x + 1)
    if rule in (13, 14):
        (a,) = args
        src, dst = (SP, SS) if rule == 13 else (GP, GS)
        _need(nodes[a].kind == src, f"rule {rule} needs {src}")
        new = dict(nodes)
        new[a] = GNode(dst, nodes[a].contents)
        return GenGraph(new, dict(edges), s.next_id)
    raise RuleError(f"unknown rule {rule}")


# --- search ---------------------------------------------------------------------


@dataclass
class OracleResult:
    status: str  # "match", "no-match" or "unknown"
    rules: list = field(default_factory=list)  # [(rule, args), ...]
    bijection: dict = field(default_factory=dict)  # pattern node -> node id in the final state
    final: Optional[GenGraph] = None
    states: int = 0
    reason: str = ""

    @property
    def matched(self) -> Optional[bool]:
        return {"match": True, "no-match": False}.get(self.status)

    def mapping(self) -> dict:
        """Graph node -> pattern node, read off the final generalized graph."""
        out = {}
        for pn, nid in self.bijection.items():
            for v in self.final.nodes[nid].contents:
                out[v] = pn
        return out


class _Budget(Exception):
    pass


def canonical_key(s: GenGraph):
    """State key that ignores node ids; placeholders are told apart by their surroundings."""
    lab = {i: repr((n.kind, n.contents)) for i, n in s.nodes.items()}
    holders = [i for i, n in s.nodes.items() if n.empty]
    for _ in range(3 if holders else 0):
        new = {}
        for i in holders:
            outs = sorted((lab[b], tuple(sorted(u))) for (a, b), u in s.edges.items() if a == i)
            ins = sorted((lab[a], tuple(sorted(u))) for (a, b), u in s.edges.items() if b == i)
            new[i] = repr((s.nodes[i].kind, outs, ins))
        lab.update({i: str(hash(t)) for i, t in new.items()})
    edges = sorted((lab[a], lab[b], tuple(sorted(u))) for (a, b), u in s.edges.items())
    return tuple(sorted(lab.values())), tuple(edges)


class _Pattern:
    def __init__(self, p: ReGaP):
        self.p = p
        self.concrete = list(p.concrete)
        self.kind = {n: (C if p.kind[n] == CONCRETE else KIND_OF[p.kind[n]]) for n in p.nodes}
        self.count = {k: sum(1 for n in p.nodes if self.kind[n] == k) for k in (C, SP, GP, SS, GS)}
        self.zero = {n for n in p.nodes if self.kind[n] in (SS, GS)}
        self.edges = set(p.edges)
        self.succ = {n: set(p.successors(n)) for n in p.nodes}
        self.pred = {n: set(p.predecessors(n)) for n in p.nodes}
        self.has_s = self.count[SP] + self.count[SS] > 0
        self.has_g = self.count[GP] + self.count[GS] > 0
        # (a, b) -> kinds of the 0+ nodes on some path a -> W1 -> ... -> b,
        # and the most 0+ nodes such a path passes
        self.routes = {}
        self.route_len = {}
        for a in p.nodes:
            self._walk(a, [a])

    def _walk(self, a, path):
        for nxt in self.succ[path[-1]]:
            if nxt in path[1:]:
                continue
            if len(path) > 1:
                self.routes.setdefault((a, nxt), set()).update(self.kind[w] for w in path[1:])
                self.route_len[(a, nxt)] = max(self.route_len.get((a, nxt), 0), len(path) - 1)
            if nxt in self.zero and nxt != a:
                self._walk(a, path + [nxt])

    def placeholder_kinds(self):
        return [k for k in (SS, GS) if self.count[k]]


class _Search:
    def __init__(self, p: ReGaP, g: AttributedGraph, max_states: int, deadline: Optional[float]):
        self.P = _Pattern(p)
        self.g = g
        self.max_states = max_states
        self.deadline = deadline
        self.seen = set()
        self.states = 0

    # -- helpers --

    def _tick(self):
        self.states += 1
        if self.states > self.max_states:
            raise _Budget("state limit")
        if self.deadline is not None and (self.states & 255) == 0 and time.monotonic() > self.deadline:
            raise _Budget("time limit")

    def concrete_ids(self, s):
        return {n.contents[0]: i for i, n in s.nodes.items() if n.kind == C}

    def bijections(self, s):
        """Concrete pattern node -> concrete state node assignments compatible with
        constraints and with the edges between concrete nodes."""
        P, g = self.P, self.g
        ids = self.concrete_ids(s)
        if len(ids) != len(P.concrete):
            return
        gnodes = sorted(ids)
        for perm in itertools.permutations(gnodes):
            h = dict(zip(P.concrete, perm))
            if not all(eval_node_constraint(P.p.node_constraint(a), g.node_attrs[h[a]]) for a in h):
                continue
            if not all(
                eval_pair_constraint(psi, g.node_attrs[h[a]], g.node_attrs[h[b]])
                for (a, b), psi in P.p.pair_constraints.items()
            ):
                continue
            back = {v: a for a, v in h.items()}
            ok = True
            for a, b in P.edges:
                if a in h and b in h and (ids[h[a]], ids[h[b]]) not in s.edges:
                    ok = False
                    break
            if ok:
                for (x, y) in s.edges:
                    nx, ny = s.nodes[x], s.nodes[y]
                    if nx.kind == C and ny.kind == C:
                        pair = (back[nx.contents[0]], back[ny.contents[0]])
                        if pair not in P.edges and pair not in P.routes:
                            ok = False
                            break
            if ok:
                yield h

    def _compat(self, s, x, a, back):
        n = s.nodes[x]
        ka = self.P.kind[a]
        if n.kind == C:
            return back.get(n.contents[0]) == a
        if n.empty:
            return ka in (SS, GS)
        if n.kind == GP:
            return ka in (GP, GS)
        return ka != C

    def _reachable_kinds(self, s, i, last) -> tuple:
        """Pattern node kinds that state node ``i`` may still end up as."""
        n = s.nodes[i]
        if n.kind == SP:
            return (SP, SS, GP, GS) if last <= 6 else (SP, SS)
        if n.kind == GP:
            return (GP, GS)
        if n.kind == GS or not n.empty:
            return (n.kind,)
        if last <= 5 or last <= 12 and not (s.succ(i) and s.pred(i)):
            return (SS, GS)  # rules 5, 11 and 12 can still retype it
        return (SS,)

    def _fits(self, w, ins, outs, exact) -> bool:
        P, attrs = self.P, self.g.edge_attrs
        for a, under in ins:
            if a not in P.pred[w]:
                return False
            phi = P.p.edge_constraint((a, w))
            if not all(eval_edge_constraint(phi, attrs[e]) for e in under):
                return False
        for b, under in outs:
            if b not in P.succ[w]:
                return False
            phi = P.p.edge_constraint((w, b))
            if not all(eval_edge_constraint(phi, attrs[e]) for e in under):
                return False
        if exact:
            conc = set(P.concrete)
            if len(ins) != len(P.pred[w] & conc) or len(outs) != len(P.succ[w] & conc):
                return False
        return True

    # -- pruning --

    def viable(self, s, last, h) -> bool:
        P = self.P
        n_c = sum(1 for n in s.nodes.values() if n.kind == C)
        if n_c < len(P.concrete):
            return False
        if last >= 2 and not P.has_g:
            # Without rule 6 nothing merges non-empty sequences any more.
            full = sum(1 for n in s.nodes.values() if n.kind != C and not n.empty)
            if full > P.count[SP] + P.count[SS]:
                return False
        if last < 3:
            return True
        ids = self.concrete_ids(s)
        for a in P.concrete:
            x = ids[h[a]]
            for mine, theirs in ((s.succ(x), P.succ[a]), (s.pred(x), P.pred[a])):
                # Routing keeps neighbour counts, only merges shrink a non-empty
                # neighbour set, and rules 7/8 add one neighbour to an empty one.
                if not mine:
                    if len(theirs) > 1:
                        return False
                elif len(mine) < len(theirs) or not theirs:
                    return False
                elif last >= 7 and len(mine) != len(theirs):
                    return False
        if last < 4:
            return True
        back = {v: a for a, v in h.items()}
        # Once routing is over, concrete neighbours of a wildcard node (and the
        # graph edges to them) only accumulate, so some pattern node it can
        # still become accepts them. From rule 6 on, an inner placeholder's
        # concrete neighbourhood is final.
        for i, n in s.nodes.items():
            if n.kind == C:
                continue
            ins = [(back[s.nodes[x].contents[0]], s.edges[(x, i)]) for x in s.pred(i) if s.nodes[x].kind == C]
            outs = [(back[s.nodes[y].contents[0]], s.edges[(i, y)]) for y in s.succ(i) if s.nodes[y].kind == C]
            kinds = self._reachable_kinds(s, i, last)
            exact = last >= 6 and n.empty and s.pred(i) and s.succ(i)
            if not any(
                P.kind[w] in kinds and self._fits(w, ins, outs, exact) for w in P.p.nodes
            ):
                return False
        for (x, y), under in s.edges.items():
            nx, ny = s.nodes[x], s.nodes[y]
            if nx.kind == C and ny.kind == C:
                pe = (back[nx.contents[0]], back[ny.contents[0]])
                if pe not in P.edges:
                    return False
                phi = P.p.edge_constraint(pe)
                if not all(eval_edge_constraint(phi, self.g.edge_attrs[e]) for e in under):
                    return False
        if last >= 6:
            # Placeholders with both neighbours can no longer merge.
            total = 0
            for k in (SS, GS):
                inner = sum(1 for i, n in s.nodes.items() if n.kind == k and n.empty and s.succ(i) and s.pred(i))
                if inner > P.count[k]:
                    return False
                total += inner
            if total > self._zero_slots(s, last):
                return False
        if last >= 7:
            if len(s.edges) > len(P.edges):
                return False
            full = {k: 0 for k in (SP, GP, SS, GS)}
            fixed_empty = {SS: 0, GS: 0}
            for i, n in s.nodes.items():
                if n.kind == C:
                    continue
                if n.empty:
                    if s.succ(i) and s.pred(i):
                        fixed_empty[n.kind] += 1
                else:
                    full[n.kind] += 1
            n_s, n_g = full[SP] + full[SS], full[GP] + full[GS]
            if not (P.count[SP] <= n_s <= P.count[SP] + P.count[SS]):
                return False
            if not (P.count[GP] <= n_g <= P.count[GP] + P.count[GS]):
                return False
            if fixed_empty[SS] + max(0, n_s - P.count[SP]) > P.count[SS]:
                return False
            if fixed_empty[GS] + max(0, n_g - P.count[GP]) > P.count[GS]:
                return False
        return True

    # -- moves --

    def candidates(self, s, rule, h):
        P = self.P
        nodes = s.nodes
        kinds0 = P.placeholder_kinds()
        by_kind = {k: sorted(i for i, n in nodes.items() if n.kind == k) for k in (C, SP, GP, SS, GS)}
        if rule == 1:
            # Without sequence wildcards an S+ could only end up merged into a
            # G+ by rule 6, which a G+ does just as well.
            kinds = ([SP] if P.has_s else []) + ([GP] if P.has_g else [])
            if len(by_kind[C]) > len(P.concrete):
                for u in by_kind[C]:
                    for k in kinds:
                        yield (u, k)
        elif rule == 2:
            if len(by_kind[C]) > len(P.concrete):
                for w in by_kind[SP]:
                    pr = s.pred(w)
                    if len(pr) == 1:
                        (u,) = pr
                        if nodes[u].kind == C and s.succ(u) == {w}:
                            yield (u, w)
        elif rule == 3:
            back = {v: a for a, v in h.items()}
            for (x, y) in sorted(s.edges):
                # Routing stretches a chain of placeholders between two real
                # nodes; some pattern route must be long enough to hold it.
                x0, y0, chain = x, y, 1
                while nodes[x0].empty:
                    (x0,) = s.pred(x0)
                    chain += 1
                while nodes[y0].empty:
                    (y0,) = s.succ(y0)
                    chain += 1
                kinds = set()
                for (a, b), ks in P.routes.items():
                    if P.route_len[(a, b)] < chain:
                        continue
                    if self._compat(s, x0, a, back) and self._compat(s, y0, b, back):
                        kinds |= ks
                for k in kinds0:
                    if k in kinds:
                        yield (x, y, k)
        elif rule in (4, 9, 10):
            for a, b in itertools.combinations(by_kind[SS], 2):
                if rule == 9 and (s.succ(a) or s.succ(b)):
                    continue
                if rule == 10 and (s.pred(a) or s.pred(b)):
                    continue
                yield (a, b)
        elif rule in (5, 11, 12):
            for w in by_kind[GS]:
                for a in by_kind[SS] + [x for x in by_kind[GS] if x < w]:
                    if rule == 11 and (s.succ(a) or s.succ(w)):
                        continue
                    if rule == 12 and (s.pred(a) or s.pred(w)):
                        continue
                    yield (a, w)
        elif rule == 6:
            if P.has_g:
                plus = by_kind[SP] + by_kind[GP]
                for a in plus:
                    for w in sorted(i for i, n in nodes.items() if n.kind != C and not n.empty):
                        if w != a and not (w in plus and w < a):
                            yield (a, w)
        elif rule in (7, 8):
            if len(s.edges) < len(P.edges):
                for a in sorted(nodes):
                    if not (s.succ(a) if rule == 7 else s.pred(a)):
                        for k in kinds0:
                            yield (a, k)
        elif rule == 13:
            if P.count[SS]:
                for a in by_kind[SP]:
                    yield (a,)
        elif rule == 14:
            if P.count[GS]:
                for a in by_kind[GP]:
                    yield (a,)

    def final(self, s, h) -> Optional[dict]:
        """A bijection pattern node -> state node, or None."""
        P = self.P
        if len(s.nodes) != len(P.p.nodes):
            return None
        groups = {k: sorted(i for i, n in s.nodes.items() if n.kind == k) for k in (SP, GP, SS, GS)}
        if any(len(groups[k]) != P.count[k] for k in groups):
            return None
        ids = self.concrete_ids(s)
        base = {a: ids[h[a]] for a in P.concrete}
        wild = {k: [n for n in P.p.nodes if P.kind[n] == k] for k in groups}
        choices = [list(itertools.permutations(groups[k])) for k in groups]
        for combo in itertools.product(*choices):
            f = dict(base)
            for k, perm in zip(groups, combo):
                f.update(zip(wild[k], perm))
            image = {(f[a], f[b]) for a, b in P.edges}
            if image != set(s.edges):
                continue
            if all(
                eval_edge_constraint(P.p.edge_constraint((a, b)), self.g.edge_attrs[e])
                for a, b in P.edges
                for e in s.edges[(f[a], f[b])]
            ):
                return f
        return None

    def _closed_blocks(self, s, fence, rule) -> bool:
        """Within one merge phase the merged-away id only grows, so placeholders
        with ids up to ``fence`` can no longer meet; too many of them is hopeless."""
        P = self.P
        if rule == 4 and P.count[GS]:
            return False  # rule 5 may still join them
        closed = sum(1 for i, n in s.nodes.items() if i <= fence and n.empty)
        return closed > self._zero_slots(s, rule)

    def _zero_slots(self, s, last) -> int:
        """0+ pattern nodes left for placeholders once the non-empty wildcards,
        merged as far as rule 6 still allows, have taken theirs."""
        P = self.P
        full = sum(1 for n in s.nodes.values() if n.kind != C and not n.empty)
        if full and last <= 6 and P.has_g:
            full = 1
        return len(P.zero) - max(0, full - P.count[SP] - P.count[GP])

    def dfs(self, s, last, h, trail, fence=-1):
        key = (canonical_key(s), last, tuple(sorted(h.items())) if h is not None else None,
               fence if last in (4, 5) else -1)
        if key in self.seen:
            return None
        self.seen.add(key)
        self._tick()
        if h is None and last >= 3:
            raise AssertionError("bijection must be fixed before rule 3")
        hs = [h] if h is not None else list(self.bijections(s))
        for hh in hs:
            f = self.final(s, hh)
            if f is not None:
                return trail, f, s
        for rule in range(max(last, 1), RULE_COUNT + 1):
            for hh in (hs if rule >= 3 and h is None else [h]):
                for args in list(self.candidates(s, rule, hh)):
                    nfence = -1
                    if rule in (4, 5):
                        nfence = max(args)
                        if rule == last and nfence <= fence:
                            continue
                    try:
                        nxt = apply_rule(s, rule, args)
                    except RuleError:
                        continue
                    if not self.viable(nxt, rule, hh):
                        continue
                    if rule in (4, 5) and self._closed_blocks(nxt, nfence, rule):
                        continue
                    found = self.dfs(nxt, rule, hh, trail + [(rule, args)], nfence)
                    if found:
                        return found
        return None

def oracle_match(
    p: ReGaP,
    g: AttributedGraph,
    max_nodes: int = 8,
    max_states: int = 2_000_000,
    timeout: Optional[float] = None,
) -> OracleResult:
    """Decide whether ``p`` matches ``g`` by searching rule sequences."""
    if len(g.nodes) > max_nodes:
        return OracleResult("unknown", reason=f"graph has more than {max_nodes} nodes")
    deadline = None if timeout is None else time.monotonic() + timeout
    search = _Search(p, g, max_states, deadline)
    start = initial_state(g)
    try:
        found = search.dfs(start, 0, None, [])
    except _Budget as exc:
        return OracleResult("unknown", states=search.states, reason=str(exc))
    if found is None:
        return OracleResult("no-match", states=search.states)
    trail, f, final = found
    return OracleResult("match", rules=trail, bijection=f, final=final, states=search.states)


def _rule_args(s: GenGraph, rule: int):
    """Every argument tuple of the right shape; apply_rule checks the side conditions."""
    ids = sorted(s.nodes)
    if rule == 1:
        return [(u, k) for u in ids for k in (SP, GP)]
    if rule in (2, 6):
        return [(a, b) for a in ids for b in ids if a != b]
    if rule == 3:
        return [(a, b, k) for (a, b) in sorted(s.edges) for k in (SS, GS)]
    if rule in (4, 9, 10):
        return list(itertools.combinations(ids, 2))
    if rule in (5, 11, 12):
        return [(a, w) for a in ids for w in ids if a != w and not (s.nodes[a].kind == GS and a > w)]
    if rule in (7, 8):
        return [(a, k) for a in ids for k in (SS, GS)]
    return [(a,) for a in ids]


def apply_rules(s: GenGraph, last: int = 0) -> list:
    """All one-step successors ``(rule, args, state)`` using rules ``last``..14."""
    out = []
    for rule in range(max(last, 1), RULE_COUNT + 1):
        for args in _rule_args(s, rule):
            try:
                out.append((rule, args, apply_rule(s, rule, args)))
            except RuleError:
                pass
    return out


def _bijection_ok(p: ReGaP, g: AttributedGraph, s: GenGraph, f: dict) -> bool:
    kinds = {n: (C if p.kind[n] == CONCRETE else KIND_OF[p.kind[n]]) for n in p.nodes}
    if sorted(f) != sorted(p.nodes) or sorted(f.values()) != sorted(s.nodes):
        return False
    for n, i in f.items():
        node = s.nodes[i]
        if node.kind != kinds[n]:
            return False
        if node.kind == C and not eval_node_constraint(p.node_constraint(n), g.node_attrs[node.contents[0]]):
            return False
    for (a, b), psi in p.pair_constraints.items():
        if not eval_pair_constraint(psi, g.node_attrs[s.nodes[f[a]].contents[0]],
                                    g.node_attrs[s.nodes[f[b]].contents[0]]):
            return False
    if {(f[a], f[b]) for a, b in p.edges} != set(s.edges):
        return False
    return all(
        eval_edge_constraint(p.edge_constraint((a, b)), g.edge_attrs[e])
        for a, b in p.edges
        for e in s.edges[(f[a], f[b])]
    )


def is_isomorphic_to_pattern(p: ReGaP, g: AttributedGraph, s: GenGraph) -> Optional[dict]:
    """Exhaustive search for a kind- and constraint-respecting bijection
    pattern node -> state node; None if there is none."""
    if len(p.nodes) != len(s.nodes):
        return None
    pattern_nodes = sorted(p.nodes)
    for perm in itertools.permutations(sorted(s.nodes)):
        f = dict(zip(pattern_nodes, perm))
        if _bijection_ok(p, g, s, f):
            return f
    return None


def replay(p: ReGaP, g: AttributedGraph, result: OracleResult) -> bool:
    """Re-apply a match's rule sequence step by step and re-check the final bijection."""
    s = initial_state(g)
    last = 0
    for rule, args in result.rules:
        if rule < last:
            return False
        try:
            s = apply_rule(s, rule, args)
        except RuleError:
            return False
        last = rule
    return _bijection_ok(p, g, s, result.bijection)
