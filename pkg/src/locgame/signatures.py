"""Distance signatures, signature classes and distinguishing sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidConfig, InvalidPair
from .graph import UNREACHABLE, Graph

ProbeSet = tuple[int, ...]
Signature = tuple[int, ...]


def probe_set(vertices: Iterable[int], n: int) -> ProbeSet:
    """Validate and freeze an ordered probe set."""
    S = tuple(int(v) for v in vertices)
    if not S:
        raise InvalidConfig("probe set must contain at least one vertex")
    if len(set(S)) != len(S):
        raise InvalidConfig(f"probe set has repeated vertices: {S}")
    if min(S) < 0 or max(S) >= n:
        raise InvalidConfig(f"probe set {S} out of range for n={n}")
    return S


def signature(g: Graph, S: Sequence[int], v: int) -> Signature:
    """``(d(s_1, v), ..., d(s_k, v))`` in probe order."""
    row = g.distances_from(v)
    return tuple(int(row[s]) for s in S)


def signature_matrix(g: Graph, S: Sequence[int], C: np.ndarray) -> np.ndarray:
    """Signatures of the vertices in ``C`` as rows of a ``(len(C), len(S))`` array.

    Uses whichever side needs fewer BFS rows; distances are symmetric.
    """
    S = np.asarray(S, dtype=np.int64)
    if len(S) <= len(C):
        return g.distance_rows(S)[:, C].T
    return g.distance_rows(C)[:, S]


@dataclass(frozen=True)
class SignaturePartition:
    """Classes of a vertex set under equal ``S``-signature, sorted by signature.

    ``signatures[i]`` is the common signature of ``classes[i]``; each class is
    a sorted ``int64`` array.
    """

    probe: ProbeSet
    signatures: np.ndarray
    classes: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.classes)

    def signature(self, i: int) -> Signature:
        return tuple(int(x) for x in self.signatures[i])

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def total(self) -> int:
        return sum(len(c) for c in self.classes)

    def index_of(self, v: int) -> int:
        for i, cls in enumerate(self.classes):
            j = np.searchsorted(cls, v)
            if j < len(cls) and cls[j] == v:
                return i
        raise KeyError(v)

    def find_signature(self, sig: Sequence[int]) -> int | None:
        target = np.asarray(sig, dtype=self.signatures.dtype)
        hits = np.flatnonzero(np.all(self.signatures == target, axis=1))
        return int(hits[0]) if len(hits) else None

    def is_discrete(self) -> bool:
        """True when every class is a singleton (the probe set resolves the input)."""
        return all(len(c) == 1 for c in self.classes)


def partition_by_signature(g: Graph, S: Sequence[int], C: Iterable[int] | np.ndarray) -> SignaturePartition:
    S = probe_set(S, g.n)
    C = np.unique(np.asarray(list(C) if not isinstance(C, np.ndarray) else C, dtype=np.int64))
    if len(C) == 0:
        raise InvalidConfig("cannot partition an empty vertex set")
    sigs = signature_matrix(g, S, C)
    # np.unique sorts rows lexicographically; UNREACHABLE is the int32 maximum
    uniq, inverse, counts = np.unique(sigs, axis=0, return_inverse=True, return_counts=True)
    order = np.argsort(inverse.reshape(-1), kind="stable")
    classes = tuple(np.split(C[order], np.cumsum(counts)[:-1]))
    return SignaturePartition(S, uniq, classes)


def distinguishing_set(g: Graph, x: int, y: int) -> set[int]:
    """Vertices ``v`` with ``d(v, x) != d(v, y)``: a sensor there tells ``x`` from ``y``."""
    if x == y:
        raise InvalidPair("distinguishing set needs two distinct vertices")
    dx, dy = g.distances_from(x), g.distances_from(y)
    return set(np.flatnonzero(dx != dy).tolist())


@dataclass(frozen=True)
class DistinguishingProfile:
    """Per-level symmetric differences ``levels[j] = |S(x,j) ^ S(y,j)|``.

    ``union_size`` is ``|D(x, y)|``.  A vertex of ``D(x, y)`` at finite
    distance from both ``x`` and ``y`` sits in exactly two levels (one per
    endpoint), one reachable from only one endpoint sits in one level, so
    ``sum(levels) == 2 * union_size - one_sided``.
    """

    levels: tuple[int, ...]
    union_size: int
    one_sided: int

    @property
    def level_sum(self) -> int:
        return sum(self.levels)

    def partial_sum(self, upto: int) -> int:
        return sum(self.levels[: upto + 1])


def distinguishing_profile(g: Graph, x: int, y: int) -> DistinguishingProfile:
    """Level sizes ``s_0, s_1, ...`` up to the larger eccentricity of ``x`` and ``y``."""
    if x == y:
        raise InvalidPair("distinguishing profile needs two distinct vertices")
    dx, dy = g.distances_from(x), g.distances_from(y)
    finite_x = dx[dx != UNREACHABLE]
    finite_y = dy[dy != UNREACHABLE]
    top = int(max(finite_x.max(), finite_y.max()))
    cx = np.bincount(finite_x, minlength=top + 1)
    cy = np.bincount(finite_y, minlength=top + 1)
    same = dx[(dx == dy) & (dx != UNREACHABLE)]
    both = np.bincount(same, minlength=top + 1)
    levels = tuple(int(v) for v in cx + cy - 2 * both)
    differ = dx != dy
    one_sided = int(np.count_nonzero(differ & ((dx == UNREACHABLE) | (dy == UNREACHABLE))))
    return DistinguishingProfile(levels, int(np.count_nonzero(differ)), one_sided)
