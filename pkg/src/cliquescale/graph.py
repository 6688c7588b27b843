"""Immutable undirected simple graphs.

Adjacency is stored as CSR arrays (``indptr``/``indices``, neighbors sorted)
for every graph. Graphs with at most ``DENSE_THRESHOLD`` vertices additionally
expose Python-int bitsets and a packed ``uint64`` adjacency matrix, which is
what the clique enumerators work on.
"""

from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

import numpy as np

from ._kernels import csr_from_sorted_edges, degeneracy_order_csr
from .errors import MalformedInputError

__all__ = [
    "DENSE_THRESHOLD",
    "Graph",
    "build_graph",
    "vertex_set",
    "induced_subgraph",
    "complement",
    "complete_graph",
    "empty_graph",
    "perfect_matching",
    "cycle_graph",
    "path_graph",
    "comatching",
    "petersen_graph",
    "read_edge_list",
    "write_edge_list",
]

DENSE_THRESHOLD = 4096


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Do not call the constructor with unchecked data; use :func:`build_graph`.
    """

    __slots__ = ("n", "edges", "indptr", "indices", "_bits", "_packed", "_degeneracy")

    def __init__(self, n: int, edges: np.ndarray):
        # edges: (m, 2) int64, u < v, lexicographically sorted, unique
        self.n = int(n)
        self.edges = _readonly(edges)
        deg = np.bincount(edges.ravel(), minlength=n) if len(edges) else np.zeros(n, dtype=np.int64)
        indptr = np.concatenate([[0], np.cumsum(deg)]).astype(np.int64)
        indices = np.empty(2 * len(edges), dtype=np.int64)
        if len(edges):
            csr_from_sorted_edges(n, edges, indptr, indices)
        self.indices = _readonly(indices)
        self.indptr = _readonly(indptr)
        self._bits: list[int] | None = None
        self._packed: np.ndarray | None = None
        self._degeneracy: np.ndarray | None = None

    def __setattr__(self, name, value):
        if name in ("n", "edges", "indptr", "indices") and hasattr(self, name):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    def degree(self, v: int | None = None):
        deg = np.diff(self.indptr)
        return deg if v is None else int(deg[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        if self._bits is not None:
            return bool(self._bits[u] >> v & 1)
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    @property
    def is_dense(self) -> bool:
        return self.n <= DENSE_THRESHOLD

    @property
    def bitsets(self) -> list[int]:
        """Neighbor sets as Python ints (bit ``v`` of ``bitsets[u]`` set iff ``uv`` is an edge)."""
        if self._bits is None:
            bits = [0] * self.n
            for u, v in self.edges.tolist():
                bits[u] |= 1 << v
                bits[v] |= 1 << u
            object.__setattr__(self, "_bits", bits)
        return self._bits

    @property
    def packed_adjacency(self) -> np.ndarray:
        """``(n, ceil(n/64))`` uint64 adjacency bit matrix."""
        if self._packed is None:
            words = max(1, -(-self.n // 64))
            mat = np.zeros((self.n, words), dtype=np.uint64)
            if self.m:
                u = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
                v = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
                bit = np.left_shift(np.uint64(1), (v % 64).astype(np.uint64))
                np.bitwise_or.at(mat, (u, v // 64), bit)
            object.__setattr__(self, "_packed", _readonly(mat))
        return self._packed

    def degeneracy_order(self) -> np.ndarray:
        """Smallest-last vertex ordering (ties broken by vertex id)."""
        if self._degeneracy is None:
            order = degeneracy_order_csr(self.n, self.indptr, self.indices)
            object.__setattr__(self, "_degeneracy", _readonly(order))
        return self._degeneracy

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]


def _as_edge_array(n: int, edge_list) -> np.ndarray:
    arr = np.asarray(edge_list if len(edge_list) else np.empty((0, 2)), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise MalformedInputError("edge list must be a sequence of pairs")
    if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
        raise MalformedInputError("edge endpoints must be integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0) | (arr >= n)][0]
        raise MalformedInputError(f"endpoint {bad} outside 0..{n - 1}")
    return arr


def build_graph(n: int, edge_list) -> Graph:
    """Build a graph from pairs in any order; duplicates and self-loops are dropped."""
    if n < 0:
        raise MalformedInputError("vertex count must be non-negative")
    arr = _as_edge_array(n, edge_list)
    arr = arr[arr[:, 0] != arr[:, 1]]
    arr = np.sort(arr, axis=1)
    if len(arr):
        arr = np.unique(arr, axis=0)
    return Graph(n, np.ascontiguousarray(arr, dtype=np.int64).reshape(-1, 2))


def _from_canonical(n: int, edges: np.ndarray) -> Graph:
    # edges already u < v, sorted, unique
    return Graph(n, np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2))


def vertex_set(g: Graph, s: Iterable[int]) -> np.ndarray:
    """Validate ``s`` against ``g`` and return it as a strictly increasing array."""
    arr = np.asarray(list(s), dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= g.n):
        raise MalformedInputError(f"vertex ids must lie in 0..{g.n - 1}")
    out = np.unique(arr)
    if len(out) != len(arr):
        raise MalformedInputError("vertex set contains duplicates")
    return out


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph induced by ``s``, relabeled to ``0..|s|-1``.

    Returns the subgraph and ``mapping`` with ``mapping[i]`` the original id of new vertex ``i``.
    """
    keep = vertex_set(g, s)
    relabel = np.full(g.n, -1, dtype=np.int64)
    relabel[keep] = np.arange(len(keep))
    if g.m:
        e = relabel[g.edges]
        e = e[(e[:, 0] >= 0) & (e[:, 1] >= 0)]
    else:
        e = np.empty((0, 2), dtype=np.int64)
    # relabel is monotone, so u < v and lexicographic order survive
    return _from_canonical(len(keep), e), keep


def complement(g: Graph) -> Graph:
    n = g.n
    iu, iv = np.triu_indices(n, k=1)
    present = np.zeros(len(iu), dtype=bool)
    if g.m:
        u, v = g.edges[:, 0], g.edges[:, 1]
        # index of (u, v) in row-major upper-triangle enumeration
        idx = u * n - u * (u + 1) // 2 + (v - u - 1)
        present[idx] = True
    return _from_canonical(n, np.stack([iu[~present], iv[~present]], axis=1))


def complete_graph(n: int) -> Graph:
    iu, iv = np.triu_indices(n, k=1)
    return _from_canonical(n, np.stack([iu, iv], axis=1))


def empty_graph(n: int) -> Graph:
    return _from_canonical(n, np.empty((0, 2), dtype=np.int64))


def perfect_matching(k: int) -> Graph:
    """Matching ``{2i, 2i+1}`` on ``2k`` vertices."""
    i = np.arange(k, dtype=np.int64)
    return _from_canonical(2 * k, np.stack([2 * i, 2 * i + 1], axis=1))


def comatching(k: int) -> Graph:
    """Complement of a perfect matching on ``2k`` vertices."""
    return complement(perfect_matching(k))


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


def write_edge_list(g: Graph, path) -> None:
    """Write ``n m`` followed by one ``u v`` line per edge."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges.tolist():
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> Graph:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise MalformedInputError(f"{path}: header must be 'n m'")
        try:
            n, m = int(header[0]), int(header[1])
            rows = [tuple(int(x) for x in line.split()) for line in fh if line.strip()]
        except ValueError as exc:
            raise MalformedInputError(f"{path}: {exc}") from None
    if len(rows) != m or any(len(r) != 2 for r in rows):
        raise MalformedInputError(f"{path}: expected {m} lines of 'u v'")
    return build_graph(n, rows)
