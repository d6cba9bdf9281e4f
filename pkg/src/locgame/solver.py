"""Exact localization number and metric dimension for small graphs.

Game states are candidate sets encoded as Python int bitmasks (bit ``v`` set
iff vertex ``v`` is a candidate), which is injective on vertex sets.  The
cops win from a state ``C`` within ``t + 1`` rounds iff some probe set splits
``C`` into classes that are all singletons or whose closed neighborhoods are
states won within ``t`` rounds.  :func:`cop_wins` computes the least fixpoint
of that rule by retrograde analysis over the reachable state graph: states
are settled in order of increasing capture depth, and a state that is never
settled (including every state on a cycle the robber can force) is a robber
win.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Sequence

import numpy as np

from .errors import BudgetExceeded, DisconnectedGraph, InvalidK
from .graph import Graph, is_connected
from .signatures import ProbeSet


class Verdict(str, enum.Enum):
    COP_WINS = "CopWins"
    ROBBER_WINS = "RobberWins"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class SolverBudget:
    n_max: int = 12
    k_max: int | None = None
    max_states: int = 250_000
    max_probes: int = 5_000
    max_subsets: int = 5_000_000

    def __post_init__(self):
        for name in ("n_max", "max_states", "max_probes", "max_subsets"):
            if getattr(self, name) <= 0:
                raise ValueError(f"budget field {name} must be positive")
        if self.k_max is not None and self.k_max <= 0:
            raise ValueError("budget field k_max must be positive")


@dataclass
class SolveResult:
    n: int
    k: int
    verdict: Verdict
    strategy: dict[int, ProbeSet] | None = None
    depth_bound: int | None = None
    states_explored: int = 0
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "k": self.k, "verdict": self.verdict.value,
                "states_explored": self.states_explored, "depth_bound": self.depth_bound}


def mask_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _check(g: Graph, k: int) -> None:
    if not is_connected(g):
        raise DisconnectedGraph("exact solver needs a connected graph")
    if not 1 <= k <= g.n:
        raise InvalidK(f"k must lie in [1, {g.n}], got {k}")


class _Tables:
    """Distance-derived lookup tables shared by the solvers."""

    def __init__(self, g: Graph):
        self.n = g.n
        self.dist = g.distance_rows(range(g.n)).astype(np.int64)
        self.closed = [mask_of(g.neighbors(v)) | (1 << v) for v in range(g.n)]

    def probe_classes(self, S: Sequence[int]) -> list[int]:
        """Classes of the whole vertex set under ``S``, as bitmasks in signature order."""
        groups: dict[tuple[int, ...], int] = {}
        cols = self.dist[list(S)]
        for v in range(self.n):
            key = tuple(cols[:, v].tolist())
            groups[key] = groups.get(key, 0) | (1 << v)
        return [groups[key] for key in sorted(groups)]

    def ball(self, mask: int) -> int:
        out = 0
        for v in members(mask):
            out |= self.closed[v]
        return out


def cop_wins(g: Graph, k: int, budget: SolverBudget = SolverBudget(),
             probe_order_seed: int | None = None) -> SolveResult:
    """Decide whether ``k`` sensors win on ``g``; extract a winning cop strategy if so.

    ``probe_order_seed`` shuffles the probe enumeration order.  The verdict
    and depth never depend on it; only which of several equally fast probe
    sets ends up in the strategy can change.
    """
    _check(g, k)
    n = g.n
    if n > budget.n_max or (budget.k_max is not None and k > budget.k_max):
        return SolveResult(n, k, Verdict.BUDGET_EXCEEDED, reason="graph or k above budget")
    probes = list(combinations(range(n), k))
    if len(probes) > budget.max_probes:
        return SolveResult(n, k, Verdict.BUDGET_EXCEEDED, reason="too many probe sets per state")
    if probe_order_seed is not None:
        order = np.random.Generator(np.random.PCG64(probe_order_seed)).permutation(len(probes))
        probes = [probes[i] for i in order]
    tab = _Tables(g)
    classes = [tab.probe_classes(S) for S in probes]
    ball_cache: dict[int, int] = {}

    def ball(mask: int) -> int:
        b = ball_cache.get(mask)
        if b is None:
            b = ball_cache[mask] = tab.ball(mask)
        return b

    full = (1 << n) - 1
    # options[C]: distinct successor sets reachable from C, each with the first probe producing it
    options: dict[int, list[tuple[ProbeSet, tuple[int, ...]]]] = {}
    queue = deque([full])
    options_seen: set[int] = {full}
    while queue:
        C = queue.popleft()
        seen: dict[tuple[int, ...], ProbeSet] = {}
        for S, cls in zip(probes, classes):
            succ = set()
            for m in cls:
                R = m & C
                if R and R & (R - 1):
                    succ.add(ball(R))
            key = tuple(sorted(succ))
            if key not in seen:
                seen[key] = S
        options[C] = [(S, key) for key, S in seen.items()]
        for key in seen:
            for D in key:
                if D not in options_seen:
                    options_seen.add(D)
                    queue.append(D)
                    if len(options_seen) > budget.max_states:
                        return SolveResult(n, k, Verdict.BUDGET_EXCEEDED, states_explored=len(options_seen),
                                           reason="state memo limit reached")

    # retrograde: settle states in nondecreasing capture depth
    depth: dict[int, int] = {}
    strategy: dict[int, ProbeSet] = {}
    waiting: dict[tuple[int, int], int] = {}
    preds: dict[int, list[tuple[int, int]]] = {}
    frontier: list[int] = []
    for C, opts in options.items():
        for j, (S, succ) in enumerate(opts):
            if not succ and C not in depth:
                depth[C], strategy[C] = 1, S
                frontier.append(C)
            waiting[(C, j)] = len(succ)
            for D in succ:
                preds.setdefault(D, []).append((C, j))
    t = 1
    while frontier:
        nxt = []
        for D in frontier:
            for C, j in preds.get(D, ()):
                waiting[(C, j)] -= 1
                if waiting[(C, j)] == 0 and C not in depth:
                    depth[C], strategy[C] = t + 1, options[C][j][0]
                    nxt.append(C)
        frontier = nxt
        t += 1

    if full in depth:
        return SolveResult(n, k, Verdict.COP_WINS, strategy, depth[full], len(options))
    return SolveResult(n, k, Verdict.ROBBER_WINS, None, None, len(options))


def localization_number(g: Graph, budget: SolverBudget = SolverBudget()) -> int:
    """Least ``k`` for which the cops win; scans ``k = 1, 2, ...``.

    A single vertex is located before any probe, so ``K_1`` gets 0, matching
    its metric dimension.
    """
    if not is_connected(g):
        raise DisconnectedGraph("localization number needs a connected graph")
    if g.n == 1:
        return 0
    for k in range(1, g.n + 1):
        res = cop_wins(g, k, budget)
        if res.verdict is Verdict.BUDGET_EXCEEDED:
            raise BudgetExceeded(f"k={k}: {res.reason}")
        if res.verdict is Verdict.COP_WINS:
            return k
    raise AssertionError("k = n always wins in round one")


def metric_dimension(g: Graph, budget: SolverBudget = SolverBudget()) -> int:
    """Smallest resolving set size, by ordered subset search with pair-based pruning.

    A prefix ``s_1 < ... < s_j`` is abandoned when some pair it leaves
    unresolved has no distinguishing vertex above ``s_j``, since no
    extension of the prefix could separate that pair.
    """
    if not is_connected(g):
        raise DisconnectedGraph("metric dimension needs a connected graph")
    n = g.n
    if n == 1:
        return 0
    tab = _Tables(g)
    dist = tab.dist
    # separators[x][y]: bitmask of vertices at different distance from x and y
    separators = [[mask_of(np.flatnonzero(dist[x] != dist[y])) for y in range(n)] for x in range(n)]
    examined = 0

    def refine(blocks: list[int], s: int) -> list[int]:
        out = []
        for b in blocks:
            groups: dict[int, int] = {}
            for v in members(b):
                d = int(dist[s, v])
                groups[d] = groups.get(d, 0) | (1 << v)
            out.extend(m for m in groups.values() if m & (m - 1))
        return out

    def search(blocks: list[int], start: int, left: int) -> bool:
        nonlocal examined
        examined += 1
        if examined > budget.max_subsets:
            raise BudgetExceeded("metric dimension search exceeded max_subsets")
        if not blocks:
            return True
        if left == 0:
            return False
        for b in blocks:
            vs = members(b)
            x = vs[0]
            for y in vs[1:]:
                if separators[x][y] >> start == 0:
                    return False
        for s in range(start, n - left + 1):
            if search(refine(blocks, s), s + 1, left - 1):
                return True
        return False

    for size in range(1, n):
        if search([(1 << n) - 1], 0, size):
            return size
    return n - 1


class SolverCop:
    """Cop strategy replaying a solver-extracted map from candidate set to probe set."""

    def __init__(self, result: SolveResult):
        if result.strategy is None:
            raise ValueError("no winning strategy to replay")
        self.result = result

    def choose(self, g, k, history, candidates, rng):
        return self.result.strategy[mask_of(candidates)]


def naive_cop_wins_oracle(g: Graph, k: int, depth: int) -> Verdict:
    """Memo-free exhaustive search: can the cops force capture within ``depth`` rounds?

    Self-contained on purpose (own BFS, own signatures, frozensets instead
    of bitmasks) so that it can check :func:`cop_wins`.  A line of play in
    which the robber reaches a superset of a candidate set already on the
    current path is scored for the robber.  Shrinking the candidate set never
    hurts the cops, so a cop strategy that wins within a given number of
    rounds can always be chosen to avoid such lines; the cutoff therefore
    leaves the answer unchanged while keeping robber-win searches small.
    """
    n = g.n
    adj = g.adjacency
    dist = []
    for src in range(n):
        row = [-1] * n
        row[src] = 0
        todo = deque([src])
        while todo:
            u = todo.popleft()
            for w in adj[u]:
                if row[w] < 0:
                    row[w] = row[u] + 1
                    todo.append(w)
        if min(row) < 0:
            raise DisconnectedGraph("oracle needs a connected graph")
        dist.append(row)
    closed = [frozenset(adj[v]) | {v} for v in range(n)]
    probes = list(combinations(range(n), k))

    def cop_forces(C: frozenset, rounds: int, path: tuple[frozenset, ...]) -> bool:
        if rounds == 0:
            return False
        for S in probes:
            groups: dict[tuple, list[int]] = {}
            for v in C:
                groups.setdefault(tuple(dist[s][v] for s in S), []).append(v)
            nexts = [frozenset().union(*(closed[v] for v in R)) for R in groups.values() if len(R) > 1]
            if any(nxt >= earlier for nxt in nexts for earlier in path):
                continue
            nexts.sort(key=len)
            if all(cop_forces(nxt, rounds - 1, path + (nxt,)) for nxt in nexts):
                return True
        return False

    start = frozenset(range(n))
    return Verdict.COP_WINS if cop_forces(start, depth, (start,)) else Verdict.ROBBER_WINS
