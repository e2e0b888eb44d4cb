"""Dense bit-row graphs and vertex subsets.

Each vertex owns one packed n-bit adjacency row, so the neighbour count of
``v`` inside a subset ``S`` is a word-wise AND followed by a popcount.

Edge-list text format::

    n
    i j
    i j
    ...

with one unordered pair per line, written canonically as ``i < j`` in
ascending order.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K


class GraphInputError(ValueError):
    """Raised for malformed graph or vertex-set input."""


class VertexSet:
    """Immutable subset of ``0..n-1`` stored as a sorted index array plus a packed bit mask."""

    __slots__ = ("n", "members", "bits")

    def __init__(self, n: int, members: Iterable[int] = ()):
        idx = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray) else members,
                                   dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= n):
            raise GraphInputError(f"vertex set member out of range 0..{n - 1}")
        idx.setflags(write=False)
        self.n = int(n)
        self.members = idx
        bits = K.pack_indices(idx, n)
        bits.setflags(write=False)
        self.bits = bits

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(n, np.arange(n))

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(n, np.empty(0, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.members.size)

    @property
    def size(self) -> int:
        return int(self.members.size)

    def __contains__(self, v) -> bool:
        v = int(v)
        if not 0 <= v < self.n:
            return False
        return bool((int(self.bits[v >> 6]) >> (v & 63)) & 1)

    def __iter__(self):
        return iter(self.members.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((self.n, self.members.tobytes()))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, size={self.size})"

    def union(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, np.union1d(self.members, other.members))

    def intersection(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, np.intersect1d(self.members, other.members))

    def map(self, perm: np.ndarray) -> "VertexSet":
        """Image of the set under ``v -> perm[v]``."""
        return VertexSet(self.n, np.asarray(perm, dtype=np.int64)[self.members])


class Graph:
    """Undirected simple graph on ``0..n-1``; immutable after construction."""

    __slots__ = ("n", "rows", "_degrees")

    def __init__(self, rows: np.ndarray, n: int):
        if n < 1:
            raise GraphInputError("graph needs at least one vertex")
        rows = np.ascontiguousarray(rows, dtype=np.uint64)
        if rows.shape != (n, K.n_words(n)):
            raise GraphInputError(f"row array has shape {rows.shape}, expected {(n, K.n_words(n))}")
        rows.setflags(write=False)
        self.n = int(n)
        self.rows = rows
        self._degrees = None

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, check: bool = True) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphInputError("adjacency must be square")
        if check:
            if adj.diagonal().any():
                raise GraphInputError("self-loops are not allowed")
            if not np.array_equal(adj, adj.T):
                raise GraphInputError("adjacency must be symmetric")
        return cls(K.pack_rows(adj), adj.shape[0])

    def adjacency(self) -> np.ndarray:
        return K.unpack_rows(self.rows, self.n)

    @property
    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            d = np.bitwise_count(self.rows).sum(axis=1, dtype=np.int64)
            d.setflags(write=False)
            self._degrees = d
        return self._degrees

    @property
    def num_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency(), k=1))
        return list(zip(iu.tolist(), ju.tolist()))

    def has_edge(self, i: int, j: int) -> bool:
        self._check_vertex(j)
        return bool((int(self.rows[self._check_vertex(i), j >> 6]) >> (j & 63)) & 1)

    def degree(self, v: int) -> int:
        return int(self.degrees[self._check_vertex(v)])

    def neighbor_count_in(self, v: int, s: VertexSet) -> int:
        """Number of neighbours of ``v`` inside ``s``."""
        v = self._check_vertex(v)
        self._check_set(s)
        return int(np.bitwise_count(self.rows[v] & s.bits).sum())

    def induced_degree(self, v: int, s: VertexSet) -> int:
        """Degree of ``v`` in the subgraph induced by ``s``; ``v`` must be in ``s``."""
        if v not in s:
            raise GraphInputError(f"vertex {v} is not in the subset")
        return self.neighbor_count_in(v, s)

    def counts_into(self, vertices, sets: Sequence[VertexSet] | np.ndarray) -> np.ndarray:
        """Matrix of neighbour counts: ``out[a, b] = |N(vertices[a]) ∩ sets[b]|``."""
        if isinstance(sets, np.ndarray):
            masks = sets
        elif len(sets):
            for s in sets:
                self._check_set(s)
            masks = np.stack([s.bits for s in sets])
        else:
            masks = np.zeros((0, self.rows.shape[1]), dtype=np.uint64)
        return K.count_in_sets(self.rows, np.asarray(vertices, dtype=np.int64), masks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.rows, other.rows)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"

    def _check_vertex(self, v) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise GraphInputError(f"vertex {v} out of range 0..{self.n - 1}")
        return v

    def _check_set(self, s: VertexSet) -> None:
        if s.n != self.n:
            raise GraphInputError(f"vertex set over {s.n} vertices used with a graph on {self.n}")


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from unordered pairs; duplicates collapse."""
    if n < 1:
        raise GraphInputError("graph needs at least one vertex")
    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if e.size:
        if e.min() < 0 or e.max() >= n:
            raise GraphInputError(f"edge endpoint out of range 0..{n - 1}")
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphInputError("self-loops are not allowed")
    adj = np.zeros((n, n), dtype=bool)
    adj[e[:, 0], e[:, 1]] = True
    adj[e[:, 1], e[:, 0]] = True
    return Graph.from_adjacency(adj, check=False)


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


def neighbor_count_in(g: Graph, v: int, s: VertexSet) -> int:
    return g.neighbor_count_in(v, s)


def induced_degree(g: Graph, v: int, s: VertexSet) -> int:
    return g.induced_degree(v, s)


def write_edge_list(g: Graph, path: str | os.PathLike) -> None:
    lines = [str(g.n)] + [f"{i} {j}" for i, j in g.edges()]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path, encoding="ascii") as fh:
        tokens = [line.split() for line in fh if line.strip()]
    if not tokens or len(tokens[0]) != 1:
        raise GraphInputError(f"{path}: first line must hold the vertex count")
    n = int(tokens[0][0])
    pairs = []
    for k, tok in enumerate(tokens[1:], start=1):
        if len(tok) != 2:
            raise GraphInputError(f"{path}: edge record {k} is not of the form 'i j'")
        pairs.append((int(tok[0]), int(tok[1])))
    return from_edge_list(n, pairs)
