"""Simple undirected graphs on vertices ``0..n-1`` with cached BFS distances.

Distances are ``int32`` hop counts.  Vertices in another component get the
sentinel :data:`UNREACHABLE`, which is larger than every finite distance, so
lexicographic comparisons of distance vectors put it last.

Random graphs come from :func:`generate_gnp`.  The generator is numpy's
``PCG64`` bit generator seeded with the 64-bit seed, and the C(n, 2) vertex
pairs are visited in lexicographic order ``(0,1), (0,2), ..., (n-2,n-1)``
with geometric skips, so a seed always maps to the same edge set.
"""
from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import EdgeListError, InvalidConfig

UNREACHABLE = np.iinfo(np.int32).max

# Above this many vertices batched BFS uses sparse products instead of a
# dense float32 adjacency matrix.
DENSE_LIMIT = 4096
# Upper bound on n * batch entries held in one batched BFS frontier.
_BATCH_CELLS = 1 << 24


def _gather(indptr: np.ndarray, indices: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists of ``rows``."""
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype)
    shift = np.repeat(starts - (np.cumsum(lens) - lens), lens)
    return indices[shift + np.arange(total)]


class Graph:
    """Immutable simple undirected graph in CSR form.

    Construct with :meth:`from_edges`.  Distance rows are computed on first
    use and cached per source; the cache is guarded by a lock so that a row
    is filled at most once and readers never see a partial row.
    """

    __slots__ = ("n", "m", "_indptr", "_indices", "_lock", "_rows", "_dense", "_csr", "_hash")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self._indptr = indptr
        self._indices = indices
        self._indptr.flags.writeable = False
        self._indices.flags.writeable = False
        self.m = int(len(indices) // 2)
        self._lock = threading.Lock()
        self._rows: dict[int, np.ndarray] = {}
        self._dense: np.ndarray | None = None
        self._csr: sp.csr_matrix | None = None
        self._hash: str | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "Graph":
        """Build a graph, rejecting self-loops, duplicates and bad indices."""
        if n < 1:
            raise InvalidConfig(f"graph needs at least one vertex, got n={n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if len(arr):
            if arr.min() < 0 or arr.max() >= n:
                raise EdgeListError(f"edge endpoint out of range for n={n}")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise EdgeListError("self-loop in edge list")
            lo = np.minimum(arr[:, 0], arr[:, 1])
            hi = np.maximum(arr[:, 0], arr[:, 1])
            keys = np.unique(lo * n + hi)
            if len(keys) != len(arr):
                raise EdgeListError("duplicate edge in edge list")
            lo, hi = keys // n, keys % n
        else:
            lo = hi = np.empty(0, dtype=np.int64)
        return cls._from_pairs(n, lo, hi)

    @classmethod
    def _from_pairs(cls, n: int, lo: np.ndarray, hi: np.ndarray) -> "Graph":
        # lo < hi, no duplicates: already validated by the caller
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        idx_dtype = np.int32 if n < 2**31 else np.int64
        return cls(n, indptr, dst.astype(idx_dtype))

    # -- structure -----------------------------------------------------

    def neighbors(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    @property
    def adjacency(self) -> list[list[int]]:
        """Sorted neighbor lists, one per vertex."""
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def edges(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array of ``u < v`` pairs, sorted."""
        src = np.repeat(np.arange(self.n), np.diff(self._indptr))
        keep = src < self._indices
        return np.column_stack([src[keep], self._indices[keep]]).astype(np.int64)

    def edge_hash(self) -> str:
        """SHA-256 of ``n`` and the sorted edge array as little-endian int64; a graph fingerprint."""
        if self._hash is None:
            h = hashlib.sha256(np.array([self.n, self.m], dtype="<i8").tobytes())
            h.update(np.ascontiguousarray(self.edges(), dtype="<i8").tobytes())
            self._hash = h.hexdigest()
        return self._hash

    def csr(self) -> sp.csr_matrix:
        if self._csr is None:
            data = np.ones(len(self._indices), dtype=np.float32)
            self._csr = sp.csr_matrix((data, self._indices, self._indptr), shape=(self.n, self.n))
        return self._csr

    def closed_neighborhood(self, vertices: Sequence[int] | np.ndarray) -> np.ndarray:
        """Sorted array of ``vertices`` together with all their neighbors."""
        rows = np.asarray(vertices, dtype=np.int64)
        mask = np.zeros(self.n, dtype=bool)
        mask[rows] = True
        mask[_gather(self._indptr, self._indices, rows)] = True
        return np.flatnonzero(mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self._indptr, other._indptr)
                and np.array_equal(self._indices, other._indices))

    def __hash__(self) -> int:
        return hash((self.n, self.edge_hash()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # -- distances -----------------------------------------------------

    def bfs_levels(self, sources: Sequence[int] | np.ndarray, max_depth: int | None = None) -> np.ndarray:
        """Distance from the *set* ``sources`` to every vertex, stopping after ``max_depth`` levels.

        Vertices beyond ``max_depth`` (or unreachable) get :data:`UNREACHABLE`.
        Cost is proportional to the edges touched, which keeps shallow
        queries on large graphs cheap.
        """
        dist = np.full(self.n, UNREACHABLE, dtype=np.int32)
        frontier = np.unique(np.asarray(sources, dtype=np.int64))
        dist[frontier] = 0
        level = 0
        while len(frontier) and (max_depth is None or level < max_depth):
            level += 1
            nxt = _gather(self._indptr, self._indices, frontier)
            nxt = np.unique(nxt[dist[nxt] == UNREACHABLE])
            dist[nxt] = level
            frontier = nxt.astype(np.int64)
        return dist

    def distances_from(self, v: int) -> np.ndarray:
        """Read-only BFS distance row of ``v``."""
        row = self._rows.get(v)
        if row is None:
            row = self.distance_rows([v])[0]
        return row

    def distance_rows(self, sources: Sequence[int] | np.ndarray) -> np.ndarray:
        """Stacked distance rows, shape ``(len(sources), n)``; fills the cache."""
        sources = [int(s) for s in sources]
        missing = sorted({s for s in sources if s not in self._rows})
        if missing:
            with self._lock:
                missing = [s for s in missing if s not in self._rows]
                if missing:
                    self._fill(missing)
        if not sources:
            return np.empty((0, self.n), dtype=np.int32)
        return np.stack([self._rows[s] for s in sources])

    def cached_sources(self) -> int:
        return len(self._rows)

    def _fill(self, missing: list[int]) -> None:
        if len(missing) == 1:
            row = self.bfs_levels(missing)
            row.flags.writeable = False
            self._rows[missing[0]] = row
            return
        batch = max(1, _BATCH_CELLS // max(self.n, 1))
        for start in range(0, len(missing), batch):
            chunk = missing[start:start + batch]
            block = self._batched_bfs(np.asarray(chunk, dtype=np.int64))
            for j, s in enumerate(chunk):
                row = np.ascontiguousarray(block[:, j])
                row.flags.writeable = False
                self._rows[s] = row

    def _batched_bfs(self, sources: np.ndarray) -> np.ndarray:
        # Level-synchronous BFS of all sources at once; column j belongs to sources[j].
        # Products of 0/1 float32 matrices are exact integers, so results do not
        # depend on BLAS threading.
        n, k = self.n, len(sources)
        dist = np.full((n, k), UNREACHABLE, dtype=np.int32)
        cols = np.arange(k)
        dist[sources, cols] = 0
        visited = np.zeros((n, k), dtype=bool)
        visited[sources, cols] = True
        frontier = np.zeros((n, k), dtype=np.float32)
        frontier[sources, cols] = 1.0
        if n <= DENSE_LIMIT:
            if self._dense is None:
                self._dense = self.csr().toarray()
            adj = self._dense
        else:
            adj = self.csr()
        level = 0
        while True:
            level += 1
            reach = np.asarray(adj @ frontier) > 0
            reach &= ~visited
            if not reach.any():
                break
            dist[reach] = level
            visited |= reach
            frontier = reach.astype(np.float32)
        return dist


@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfig(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidConfig(f"p must lie in [0, 1], got {self.p}")


def generate_gnp(params: GnpParams) -> Graph:
    """Sample G(n, p): each of the C(n, 2) pairs is an edge independently with probability p.

    Runs in O(n + m) by jumping between successive edges with geometric gaps.
    """
    n, p = params.n, float(params.p)
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph._from_pairs(n, np.empty(0, np.int64), np.empty(0, np.int64))
    rng = np.random.Generator(np.random.PCG64(params.seed))
    chunks = []
    pos = -1
    while True:
        remaining = total - 1 - pos
        if remaining <= 0:
            break
        size = int(min(remaining, p * remaining + 6.0 * np.sqrt(p * remaining) + 64))
        gaps = rng.geometric(p, size=size).astype(np.int64)
        hits = pos + np.cumsum(gaps)
        inside = hits[hits < total]
        chunks.append(inside)
        if len(inside) < len(hits):
            break
        pos = int(hits[-1])
    flat = np.concatenate(chunks) if chunks else np.empty(0, np.int64)
    rows = np.arange(n, dtype=np.int64)
    offsets = rows * (2 * n - rows - 1) // 2
    lo = np.searchsorted(offsets, flat, side="right") - 1
    hi = flat - offsets[lo] + lo + 1
    return Graph._from_pairs(n, lo, hi)


def bfs_distances(g: Graph, v: int) -> np.ndarray:
    """Hop distances from ``v``; :data:`UNREACHABLE` outside its component."""
    if not 0 <= v < g.n:
        raise InvalidConfig(f"vertex {v} out of range")
    return g.distances_from(v)


def sphere(g: Graph, v: int, j: int) -> set[int]:
    """Vertices at distance exactly ``j`` from ``v``."""
    if j < 0:
        raise InvalidConfig("sphere radius must be nonnegative")
    row = g._rows.get(v)
    if row is None:
        row = g.bfs_levels([v], max_depth=j)
    return set(np.flatnonzero(row == j).tolist())


def neighborhood(g: Graph, vertices: Iterable[int], j: int) -> set[int]:
    """Vertices within distance ``j`` of some vertex in ``vertices`` (closed ball union)."""
    if j < 0:
        raise InvalidConfig("neighborhood radius must be nonnegative")
    verts = list(vertices)
    if not verts:
        return set()
    dist = g.bfs_levels(verts, max_depth=j)
    return set(np.flatnonzero(dist <= j).tolist())


def is_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    return bool(np.all(g.bfs_levels([0]) != UNREACHABLE))


def diameter(g: Graph) -> int:
    """Largest finite distance, or :data:`UNREACHABLE` if ``g`` is disconnected."""
    if not is_connected(g):
        return int(UNREACHABLE)
    best = 0
    batch = max(1, _BATCH_CELLS // g.n)
    for start in range(0, g.n, batch):
        block = g._batched_bfs(np.arange(start, min(g.n, start + batch), dtype=np.int64))
        best = max(best, int(block.max()))
    return best


# -- edge-list text format ---------------------------------------------

def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, fh: TextIO) -> None:
    fh.write(format_edge_list(g))


def parse_edge_list(text: str) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"`` with ``u < v``."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise EdgeListError("empty edge list")
    try:
        n, m = (int(tok) for tok in lines[0].split())
        edges = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise EdgeListError(f"malformed edge list: {exc}") from None
    if len(edges) != m:
        raise EdgeListError(f"header announces {m} edges, found {len(edges)}")
    for e in edges:
        if len(e) != 2:
            raise EdgeListError(f"bad edge line: {e}")
        if e[0] >= e[1]:
            raise EdgeListError(f"edge {e} must satisfy u < v")
    return Graph.from_edges(n, edges)


def read_edge_list(fh: TextIO) -> Graph:
    return parse_edge_list(fh.read())


# -- small named graphs, handy in tests and the CLI ---------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])
