"""Referee for the localization game.

Two equivalent modes are provided.  In class mode (:func:`play`) the robber
picks a whole signature class each round and the next candidate set is its
closed neighborhood.  In walk mode (:func:`simulate_walk`) the robber walks
on concrete vertices and the referee tracks the set of positions consistent
with the observed signatures.  Round 1 always partitions the full vertex set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Protocol, Sequence

import numpy as np

from .errors import DisconnectedGraph, IllegalRobberMove, InvalidConfig, InvalidK
from .graph import UNREACHABLE, Graph, is_connected
from .signatures import ProbeSet, SignaturePartition, partition_by_signature

COP_WIN = "CopWin"
ROBBER_SURVIVED = "RobberSurvived"


@dataclass(frozen=True)
class CandidateSet:
    vertices: np.ndarray
    round: int = 1

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: int) -> bool:
        j = np.searchsorted(self.vertices, v)
        return bool(j < len(self.vertices) and self.vertices[j] == v)


@dataclass(frozen=True)
class RoundRecord:
    probe: ProbeSet
    partition: SignaturePartition
    chosen: int

    @property
    def chosen_class(self) -> np.ndarray:
        return self.partition.classes[self.chosen]

    @property
    def candidates(self) -> int:
        """Size of the set that was partitioned this round."""
        return self.partition.total()


class CopStrategy(Protocol):
    def choose(self, g: Graph, k: int, history: Sequence[RoundRecord],
               candidates: np.ndarray, rng: np.random.Generator) -> Sequence[int]:
        """Return the next probe set of exactly ``k`` distinct vertices.

        ``candidates`` is the set about to be partitioned; it is a function
        of ``history`` alone, so no hidden robber state leaks through it.
        """


class RobberStrategy(Protocol):
    def choose(self, g: Graph, partition: SignaturePartition,
               history: Sequence[RoundRecord], rng: np.random.Generator) -> int:
        """Return the index of the chosen class in ``partition``."""


class RobberWalk(Protocol):
    def next_vertex(self, g: Graph, probe: ProbeSet, history: Sequence[RoundRecord],
                    current: int | None, rng: np.random.Generator) -> int:
        """Return the robber's position for this round; ``current`` is None in round 1."""


@dataclass
class Transcript:
    n: int
    edge_hash: str
    k: int
    rounds: list[RoundRecord] = field(default_factory=list)
    outcome: str = ROBBER_SURVIVED
    capture_round: int | None = None
    seeds: dict[str, Any] = field(default_factory=dict)
    walk: list[int] | None = None

    @property
    def captured(self) -> bool:
        return self.outcome == COP_WIN

    def to_dict(self) -> dict[str, Any]:
        def sig(row):
            return [None if x == UNREACHABLE else int(x) for x in row]

        out: dict[str, Any] = {
            "graph": {"n": self.n, "edge_hash": self.edge_hash},
            "k": self.k,
            "rounds": [
                {
                    "probe": list(r.probe),
                    "classes": [{"sig": sig(s), "size": len(c)}
                                for s, c in zip(r.partition.signatures, r.partition.classes)],
                    "chosen": r.chosen,
                }
                for r in self.rounds
            ],
            "outcome": {"result": self.outcome, "rounds": len(self.rounds)},
            "seeds": dict(self.seeds),
        }
        if self.walk is not None:
            out["walk"] = list(self.walk)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _check_game(g: Graph, k: int, max_rounds: int) -> None:
    if not is_connected(g):
        raise DisconnectedGraph("the localization game needs a connected graph")
    if not 1 <= k <= g.n:
        raise InvalidK(f"k must lie in [1, {g.n}], got {k}")
    if max_rounds < 1:
        raise InvalidConfig("max_rounds must be at least 1")


def _probe(g: Graph, k: int, raw: Sequence[int]) -> ProbeSet:
    S = tuple(int(v) for v in raw)
    if len(S) != k or len(set(S)) != k or min(S) < 0 or max(S) >= g.n:
        raise InvalidK(f"cop strategy returned {S}, expected {k} distinct vertices")
    return S


def _rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class StepResult:
    partition: SignaturePartition
    chosen: int
    next: CandidateSet | None

    @property
    def cop_wins(self) -> bool:
        return self.next is None


def step(g: Graph, C: CandidateSet, S: Sequence[int], robber: RobberStrategy,
         history: Sequence[RoundRecord] = (), rng: np.random.Generator | None = None) -> StepResult:
    """One round of class mode: partition ``C`` by ``S`` and let the robber pick."""
    if len(C) == 0:
        raise InvalidConfig("candidate set is empty")
    part = partition_by_signature(g, S, C.vertices)
    idx = int(robber.choose(g, part, history, rng if rng is not None else _rng(0)))
    if not 0 <= idx < len(part):
        raise InvalidConfig(f"robber chose class {idx} of {len(part)}")
    chosen = part.classes[idx]
    if len(chosen) == 1:
        return StepResult(part, idx, None)
    return StepResult(part, idx, CandidateSet(g.closed_neighborhood(chosen), C.round + 1))


def play(g: Graph, k: int, cop: CopStrategy, robber: RobberStrategy,
         max_rounds: int | None = None, seed: int = 0) -> Transcript:
    """Play class mode until a forced singleton or ``max_rounds`` rounds (default ``n**2``)."""
    max_rounds = g.n * g.n if max_rounds is None else max_rounds
    _check_game(g, k, max_rounds)
    rng = _rng(seed)
    tr = Transcript(g.n, g.edge_hash(), k, seeds={"game": seed, **_strategy_seeds(cop, robber)})
    C = CandidateSet(np.arange(g.n, dtype=np.int64), 1)
    for t in range(1, max_rounds + 1):
        S = _probe(g, k, cop.choose(g, k, tr.rounds, C.vertices, rng))
        res = step(g, C, S, robber, tr.rounds, rng)
        tr.rounds.append(RoundRecord(S, res.partition, res.chosen))
        if res.cop_wins:
            tr.outcome, tr.capture_round = COP_WIN, t
            return tr
        C = res.next
    return tr


def simulate_walk(g: Graph, k: int, cop: CopStrategy, walker: RobberWalk,
                  max_rounds: int | None = None, seed: int = 0) -> Transcript:
    """Play walk mode, tracking the positions consistent with the info trail.

    Raises :class:`IllegalRobberMove` if the walk leaves the closed
    neighborhood of its previous vertex.
    """
    max_rounds = g.n * g.n if max_rounds is None else max_rounds
    _check_game(g, k, max_rounds)
    rng = _rng(seed)
    tr = Transcript(g.n, g.edge_hash(), k, seeds={"game": seed, **_strategy_seeds(cop, walker)}, walk=[])
    pool = np.arange(g.n, dtype=np.int64)
    current: int | None = None
    for t in range(1, max_rounds + 1):
        S = _probe(g, k, cop.choose(g, k, tr.rounds, pool, rng))
        v = int(walker.next_vertex(g, S, tr.rounds, current, rng))
        if not 0 <= v < g.n:
            raise IllegalRobberMove(f"vertex {v} out of range")
        if current is not None and v != current and v not in g.neighbors(current):
            raise IllegalRobberMove(f"robber moved from {current} to non-adjacent {v}")
        part = partition_by_signature(g, S, pool)
        observed = g.distance_rows(S)[:, v]
        idx = part.find_signature(observed)
        # the true position was in the pool, so its signature class must exist
        assert idx is not None and v in CandidateSet(part.classes[idx])
        tr.rounds.append(RoundRecord(S, part, idx))
        tr.walk.append(v)
        current = v
        if len(part.classes[idx]) == 1:
            tr.outcome, tr.capture_round = COP_WIN, t
            return tr
        pool = g.closed_neighborhood(part.classes[idx])
    return tr


def walk_through_classes(g: Graph, classes: Sequence[np.ndarray]) -> list[int]:
    """A legal walk visiting one vertex of each class in turn.

    Requires ``classes[t]`` to lie inside the closed neighborhood of
    ``classes[t-1]``, as every class-mode transcript guarantees.  Built
    backwards: pick any vertex of the last class, then repeatedly step to a
    vertex of the previous class within distance one.
    """
    if not classes:
        return []
    walk = [int(classes[-1][0])]
    for prev in reversed(classes[:-1]):
        here = walk[-1]
        close = np.union1d(g.neighbors(here), [here])
        options = np.intersect1d(prev, close)
        if len(options) == 0:
            raise IllegalRobberMove("classes are not a chain of closed neighborhoods")
        walk.append(int(options[0]))
    walk.reverse()
    return walk


def replay_matches(g: Graph, data: dict[str, Any]) -> bool:
    """Recompute every partition of a serialized class-mode transcript and compare."""
    if data["graph"]["n"] != g.n or data["graph"]["edge_hash"] != g.edge_hash():
        return False
    pool = np.arange(g.n, dtype=np.int64)
    for rec in data["rounds"]:
        part = partition_by_signature(g, rec["probe"], pool)
        expected = [(c["sig"], c["size"]) for c in rec["classes"]]
        got = [([None if x == UNREACHABLE else int(x) for x in s], len(c))
               for s, c in zip(part.signatures, part.classes)]
        if expected != got:
            return False
        pool = g.closed_neighborhood(part.classes[rec["chosen"]])
    return True


def _strategy_seeds(*strategies: object) -> dict[str, Any]:
    seeds = {}
    for role, s in zip(("cop", "robber"), strategies):
        seed = getattr(s, "seed", None)
        if seed is not None:
            seeds[role] = seed
    return seeds
