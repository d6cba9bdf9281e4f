"""Cop and robber strategies: the random cop, the diametric robber and baselines."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InvalidConfig, InvalidK
from .graph import Graph, diameter
from .signatures import ProbeSet, SignaturePartition


def sample_k_subset(rng: np.random.Generator, n: int, k: int) -> ProbeSet:
    """Uniform k-subset drawn one vertex at a time from those not yet chosen."""
    pool = list(range(n))
    for i in range(k):
        j = int(rng.integers(i, n))
        pool[i], pool[j] = pool[j], pool[i]
    return tuple(pool[:k])


@dataclass(frozen=True)
class RandomCopConfig:
    k: int
    seed: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidK(f"k must be positive, got {self.k}")


class RandomCop:
    """Fresh uniform random k-subset every round, ignoring the game so far.

    With a seed the strategy owns its generator; without one it draws from
    the generator the referee passes in.
    """

    def __init__(self, config: RandomCopConfig):
        self.config = config
        self.seed = config.seed
        self._rng = None if config.seed is None else np.random.Generator(np.random.PCG64(config.seed))

    def choose(self, g, k, history, candidates, rng):
        if k != self.config.k or k > g.n:
            raise InvalidK(f"random cop configured for k={self.config.k}, asked for {k} on n={g.n}")
        return sample_k_subset(self._rng if self._rng is not None else rng, g.n, k)


def random_cop(config: RandomCopConfig) -> RandomCop:
    return RandomCop(config)


class FixedCop:
    """Plays a fixed list of probe sets, then keeps repeating the last one."""

    def __init__(self, sequence: Sequence[Sequence[int]]):
        if not sequence:
            raise InvalidConfig("fixed cop needs at least one probe set")
        self.sequence = [tuple(int(v) for v in S) for S in sequence]
        sizes = {len(S) for S in self.sequence}
        if len(sizes) != 1:
            raise InvalidK(f"fixed cop probe sets have mixed sizes {sorted(sizes)}")
        self.k = sizes.pop()

    def choose(self, g, k, history, candidates, rng):
        if k != self.k:
            raise InvalidK(f"fixed cop plays {self.k} sensors, game has k={k}")
        return self.sequence[min(len(history), len(self.sequence) - 1)]


def fixed_cop(sequence: Sequence[Sequence[int]]) -> FixedCop:
    return FixedCop(sequence)


@dataclass(frozen=True)
class DiametricRobberConfig:
    target: int | None = None
    fallback: str = "far"

    def __post_init__(self):
        if self.target is not None and self.target < 1:
            raise InvalidConfig("target distance must be at least 1")
        if self.fallback not in ("far", "largest"):
            raise InvalidConfig(f"unknown fallback rule {self.fallback!r}")


class DiametricRobber:
    """Stay in the class whose signature is ``(t, t, ..., t)``, ``t`` the target distance.

    The target defaults to the exact diameter.  When that class is missing
    or a singleton while some other class is not, the robber falls back:
    under ``"far"`` to the non-singleton class with the largest minimum
    signature coordinate (ties: larger class, then smaller signature), under
    ``"largest"`` straight to the largest class.
    """

    def __init__(self, config: DiametricRobberConfig = DiametricRobberConfig()):
        self.config = config
        self._diam: dict[str, int] = {}

    def target_for(self, g: Graph) -> int:
        if self.config.target is not None:
            return self.config.target
        key = g.edge_hash()
        if key not in self._diam:
            self._diam[key] = diameter(g)
        return self._diam[key]

    def target_index(self, g: Graph, part: SignaturePartition) -> int | None:
        t = self.target_for(g)
        return part.find_signature([t] * len(part.probe))

    def choose(self, g, partition, history, rng):
        sizes = np.array(partition.sizes())
        idx = self.target_index(g, partition)
        if idx is not None and sizes[idx] > 1:
            return idx
        big = np.flatnonzero(sizes > 1)
        if len(big) == 0:
            return idx if idx is not None else 0
        if self.config.fallback == "far":
            mins = partition.signatures[big].min(axis=1)
            # lexsort: last key is primary; classes are already in signature order
            order = np.lexsort((big, -sizes[big], -mins))
            return int(big[order[0]])
        return _largest(sizes)


def diametric_robber(config: DiametricRobberConfig = DiametricRobberConfig()) -> DiametricRobber:
    return DiametricRobber(config)


def _largest(sizes: np.ndarray) -> int:
    return int(np.argmax(sizes))


def neighborhood_sizes(g: Graph, partition: SignaturePartition) -> np.ndarray:
    """``|N(R, 1)|`` for every class ``R`` of ``partition``."""
    verts = np.concatenate(partition.classes)
    labels = np.repeat(np.arange(len(partition)), partition.sizes())
    member = sp.csr_matrix((np.ones(len(verts), dtype=np.float32), (labels, verts)),
                           shape=(len(partition), g.n))
    closed = g.csr() + sp.identity(g.n, dtype=np.float32, format="csr")
    return (member @ closed).getnnz(axis=1)


class GreedyRobber:
    """Pick the class with the largest closed neighborhood; ties by size, then signature."""

    def choose(self, g, partition, history, rng):
        reach = neighborhood_sizes(g, partition)
        sizes = np.array(partition.sizes())
        order = np.lexsort((np.arange(len(sizes)), -sizes, -reach))
        return int(order[0])


def greedy_robber() -> GreedyRobber:
    return GreedyRobber()


class RandomRobber:
    """Uniformly random class; a baseline adversary for strategy replay tests."""

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self._rng = None if seed is None else np.random.Generator(np.random.PCG64(seed))

    def choose(self, g, partition, history, rng):
        return int((self._rng or rng).integers(len(partition)))


class LargestClassRobber:
    def choose(self, g, partition, history, rng):
        return _largest(np.array(partition.sizes()))


class RandomWalker:
    """Robber walk: uniform start, then uniform over the closed neighborhood."""

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self._rng = None if seed is None else np.random.Generator(np.random.PCG64(seed))

    def next_vertex(self, g, probe, history, current, rng):
        r = self._rng or rng
        if current is None:
            return int(r.integers(g.n))
        options = np.append(g.neighbors(current), current)
        return int(options[r.integers(len(options))])


class ScriptedWalk:
    """Replays a fixed vertex sequence, staying on the last vertex afterwards."""

    def __init__(self, walk: Sequence[int]):
        if not walk:
            raise InvalidConfig("scripted walk is empty")
        self.walk = [int(v) for v in walk]

    def next_vertex(self, g, probe, history, current, rng):
        return self.walk[min(len(history), len(self.walk) - 1)]


COP_NAMES = ("random-cop", "fixed-cop")
ROBBER_NAMES = ("diametric-robber", "greedy-robber", "random-robber", "largest-robber")


def make_cop(name: str, k: int, seed: int | None = None,
             sequence: Sequence[Sequence[int]] | None = None):
    if name == "random-cop":
        return random_cop(RandomCopConfig(k, seed))
    if name == "fixed-cop":
        if sequence is None:
            raise InvalidConfig("fixed-cop needs a probe sequence")
        return fixed_cop(sequence)
    raise InvalidConfig(f"unknown cop strategy {name!r}")


def make_robber(name: str, seed: int | None = None, target: int | None = None):
    if name == "diametric-robber":
        return diametric_robber(DiametricRobberConfig(target))
    if name == "greedy-robber":
        return greedy_robber()
    if name == "random-robber":
        return RandomRobber(seed)
    if name == "largest-robber":
        return LargestClassRobber()
    raise InvalidConfig(f"unknown robber strategy {name!r}")

