"""Maximal clique enumeration and counting.

Two engines implement the same pivoted Bron-Kerbosch search (Tomita pivot,
outer loop in degeneracy order):

* a Python engine over int bitsets that can hand every clique to a sink;
* a numba engine over packed ``uint64`` rows for count-only runs.

By convention the empty clique is never counted, so the empty graph on zero
vertices has census total 0.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, OracleRefusal, ParameterError, PartialCountError
from .graph import Graph, vertex_set

__all__ = [
    "COUNT_BITS",
    "CliqueCensus",
    "enumerate_maximal_cliques",
    "count_maximal_cliques",
    "brute_force_maximal_cliques",
    "is_maximal_clique",
    "count_comatching_cliques",
    "comatching_order",
    "maximal_cliques_of_size",
]

# counts live in Python ints; anything at or above 2**COUNT_BITS is reported as overflow
COUNT_BITS = 128
BRUTE_FORCE_MAX_N = 20
SLICE_CLIQUES = 1 << 22
SLICE_VERTICES = 4096
# sparse-path vertices with more later neighbors run in resumable slices;
# at most 3**(40/3), about 2e6, maximal cliques fit under the limit
HEAVY_LATER = 40

Sink = Callable[[tuple[int, ...]], object]


@dataclass
class CliqueCensus:
    total: int = 0
    by_size: dict[int, int] = field(default_factory=dict)
    cliques: list[tuple[int, ...]] | None = None

    @property
    def max_size(self) -> int:
        return max(self.by_size, default=0)

    def add(self, size: int, count: int = 1) -> None:
        self.by_size[size] = self.by_size.get(size, 0) + count
        self.total += count
        if self.total >> COUNT_BITS:
            raise OverflowError(f"maximal clique count exceeds {COUNT_BITS}-bit range")

    def merge(self, other: CliqueCensus) -> CliqueCensus:
        out = CliqueCensus(by_size=dict(self.by_size))
        out.total = self.total
        for k, c in other.by_size.items():
            out.add(k, c)
        if self.cliques is not None or other.cliques is not None:
            out.cliques = (self.cliques or []) + (other.cliques or [])
        return out

    def clique_set(self) -> set[tuple[int, ...]]:
        if self.cliques is None:
            raise ValueError("census was built in count-only mode")
        return set(self.cliques)

    def same_counts(self, other: CliqueCensus) -> bool:
        return self.total == other.total and self.by_size == other.by_size

    @classmethod
    def from_array(cls, by_size: np.ndarray) -> CliqueCensus:
        c = cls()
        for k in np.flatnonzero(by_size):
            c.add(int(k), int(by_size[k]))
        return c


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class _Stop(Exception):
    pass


def _python_engine(g: Graph, emit: Callable[[list[int]], None]) -> None:
    bits = g.bitsets
    order = g.degeneracy_order().tolist()
    rank = [0] * g.n
    for i, v in enumerate(order):
        rank[v] = i
    identity = range(g.n)
    for v in order:
        nb_v = bits[v]
        P = 0
        for u in _iter_bits(nb_v):
            if rank[u] > rank[v]:
                P |= 1 << u
        _expand_local([v], P, nb_v & ~P, bits, identity, emit)


def enumerate_maximal_cliques(
    g: Graph,
    sink: Sink | None = None,
    *,
    collect: bool = False,
    count_only: bool | None = None,
    budget_cliques: int | None = None,
    budget_seconds: float | None = None,
) -> CliqueCensus:
    """Enumerate every maximal clique of ``g`` exactly once.

    Each clique is passed to ``sink`` as a sorted tuple; ``collect`` keeps them
    on the returned census. With neither, the count-only numba engine is used
    unless ``count_only=False`` forces the Python engine.

    Raises :class:`BudgetExceeded` (carrying the partial census) when a budget
    is exhausted, and :class:`PartialCountError` if the sink raises.
    """
    if count_only is None:
        count_only = sink is None and not collect
    if count_only:
        return count_maximal_cliques(g, budget_cliques=budget_cliques, budget_seconds=budget_seconds)

    census = CliqueCensus(cliques=[] if collect else None)
    start = time.monotonic()

    def emit(clique: list[int]) -> None:
        c = tuple(sorted(clique))
        census.add(len(c))
        if collect:
            census.cliques.append(c)
        if sink is not None:
            try:
                sink(c)
            except Exception as exc:
                raise PartialCountError(f"sink failed after {census.total} cliques: {exc}", census) from exc
        if budget_cliques is not None and census.total >= budget_cliques:
            raise _Stop
        if budget_seconds is not None and time.monotonic() - start > budget_seconds:
            raise _Stop

    if g.n == 0:
        return census
    try:
        if g.is_dense:
            _python_engine(g, emit)
        else:
            _sparse_python(g, emit)
    except _Stop:
        raise BudgetExceeded(f"budget exhausted after {census.total} cliques", census) from None
    return census


def _sparse_python(g: Graph, emit) -> None:
    order = g.degeneracy_order().tolist()
    rank = [0] * g.n
    for i, v in enumerate(order):
        rank[v] = i
    for v in order:
        local = g.neighbors(v).tolist()
        index = {u: i for i, u in enumerate(local)}
        nb = [0] * len(local)
        for i, u in enumerate(local):
            for w in g.neighbors(u).tolist():
                j = index.get(w)
                if j is not None:
                    nb[i] |= 1 << j
        P = X = 0
        for i, u in enumerate(local):
            if rank[u] > rank[v]:
                P |= 1 << i
            else:
                X |= 1 << i
        _expand_local([v], P, X, nb, local, emit)


def _expand_local(R, P, X, nb, local, emit) -> None:
    if not P:
        if not X:
            emit(R)
        return
    pivot_cnt, pivot = -1, 0
    for u in _iter_bits(P | X):
        c = (P & nb[u]).bit_count()
        if c > pivot_cnt:
            pivot_cnt, pivot = c, u
    for u in _iter_bits(P & ~nb[pivot]):
        R.append(local[u])
        _expand_local(R, P & nb[u], X & nb[u], nb, local, emit)
        R.pop()
        P &= ~(1 << u)
        X |= 1 << u


def _dense_relabeled(g: Graph) -> tuple[np.ndarray, int]:
    order = g.degeneracy_order()
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    words = max(1, -(-g.n // 64))
    adj = np.zeros((g.n, words), dtype=np.uint64)
    later = np.zeros(g.n, dtype=np.int64)
    if g.m:
        e = rank[g.edges]
        u = np.concatenate([e[:, 0], e[:, 1]])
        v = np.concatenate([e[:, 1], e[:, 0]])
        np.bitwise_or.at(adj, (u, v // 64), np.left_shift(np.uint64(1), (v % 64).astype(np.uint64)))
        np.add.at(later, np.minimum(e[:, 0], e[:, 1]), 1)
    return adj, int(later.max(initial=0)) + 1


def count_maximal_cliques(
    g: Graph,
    *,
    budget_cliques: int | None = None,
    budget_seconds: float | None = None,
) -> CliqueCensus:
    """Count-only census through the numba engine.

    Work runs in slices of at most :data:`SLICE_CLIQUES` cliques, or on the
    sparse path :data:`SLICE_VERTICES` light outer vertices, so the time
    budget is checked regularly.
    """
    by_size = np.zeros(g.n + 2, dtype=np.int64)
    if g.n == 0:
        return CliqueCensus()
    remaining = budget_cliques if budget_cliques is not None else np.iinfo(np.int64).max
    start = time.monotonic()

    def check_time():
        if budget_seconds is not None and time.monotonic() - start > budget_seconds:
            raise BudgetExceeded(
                f"time budget exhausted after {int(by_size.sum())} cliques", CliqueCensus.from_array(by_size)
            )

    def clique_budget_hit():
        return BudgetExceeded(
            f"clique budget exhausted after {int(by_size.sum())} cliques", CliqueCensus.from_array(by_size)
        )

    def resume(adj, v_start, v_end, max_depth):
        nonlocal remaining
        rows = min(adj.shape[0], max_depth) + 1
        P, X, C = (np.zeros((rows, adj.shape[1]), dtype=np.uint64) for _ in range(3))
        state = np.array([v_start, -1], dtype=np.int64)
        while state[0] < v_end:
            if remaining <= 0:
                raise clique_budget_hit()
            found = _kernels.bk_resume(adj, v_end, by_size, min(SLICE_CLIQUES, remaining), P, X, C, state)
            remaining -= found
            if state[0] < v_end:
                check_time()

    if g.is_dense:
        adj, max_depth = _dense_relabeled(g)
        resume(adj, 0, g.n, max_depth)
        return CliqueCensus.from_array(by_size)

    order = g.degeneracy_order()
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    local = np.full(g.n, -1, dtype=np.int64)
    i = 0
    while i < g.n:
        if remaining <= 0:
            raise clique_budget_hit()
        i1 = min(g.n, i + SLICE_VERTICES)
        i, found, status = _kernels.bk_count_sparse(g.indptr, g.indices, order, rank, local, by_size, remaining, i, i1, HEAVY_LATER)
        remaining -= found
        if status == 1:
            raise clique_budget_hit()
        if status == 2:
            adj, a, b = _kernels.sparse_local_problem(g.indptr, g.indices, order, rank, local, i)
            resume(adj, a, a + 1, b - a + 1)
            i += 1
        if i < g.n:
            check_time()
    return CliqueCensus.from_array(by_size)


def brute_force_maximal_cliques(g: Graph) -> CliqueCensus:
    """Reference census by scanning all ``2**n`` vertex subsets (``n <= 20``)."""
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise OracleRefusal(f"brute force oracle refuses n={n} > {BRUTE_FORCE_MAX_N}")
    size = 1 << n
    nbr = np.array(g.bitsets if n else [], dtype=np.int64)
    is_clique = np.zeros(size, dtype=bool)
    common = np.zeros(size, dtype=np.int64)
    is_clique[0] = True
    common[0] = size - 1
    for v in range(n):
        lo, hi = 1 << v, 2 << v
        rest = np.arange(lo)  # subsets of lower vertices; S = rest | bit v
        is_clique[lo:hi] = is_clique[rest] & ((rest & ~nbr[v]) == 0)
        common[lo:hi] = common[rest] & nbr[v]
    maximal = np.flatnonzero(is_clique & (common == 0))
    census = CliqueCensus(cliques=[])
    for s in maximal.tolist():
        if s == 0:
            continue
        members = tuple(i for i in range(n) if s >> i & 1)
        census.add(len(members))
        census.cliques.append(members)
    return census


def is_maximal_clique(g: Graph, s) -> bool:
    members = vertex_set(g, s).tolist()
    if not members:
        return g.n == 0
    bits = g.bitsets if g.is_dense else None
    if bits is not None:
        mask = sum(1 << v for v in members)
        if any((mask & ~(1 << v)) & ~bits[v] for v in members):
            return False
        common = ~0
        for v in members:
            common &= bits[v]
        return common == 0
    for i, u in enumerate(members):
        if any(not g.has_edge(u, v) for v in members[i + 1 :]):
            return False
    base = min(members, key=g.degree)
    inside = set(members)
    return not any(
        x not in inside and all(g.has_edge(x, v) for v in members) for x in g.neighbors(base).tolist()
    )


def count_comatching_cliques(k: int) -> int:
    """Number of maximal cliques of a co-matching on ``2k`` vertices, ``2**k``."""
    if k < 0:
        raise ParameterError("k must be non-negative")
    if k >= COUNT_BITS:
        raise OverflowError(f"2**{k} exceeds the {COUNT_BITS}-bit count range")
    return 1 << k


def comatching_order(g: Graph) -> int | None:
    """``k`` if ``g`` is the complement of a perfect matching on ``2k`` vertices, else ``None``.

    Checked from degrees alone: every vertex must miss exactly one other
    vertex, which makes the missing pairs a perfect matching.
    """
    if g.n % 2 or g.m != g.n * (g.n - 2) // 2:
        return None
    if g.n and not np.all(g.degree() == g.n - 2):
        return None
    return g.n // 2


def maximal_cliques_of_size(g: Graph, k: int, *, emit: bool = False):
    """Maximal cliques with exactly ``k`` vertices, without a full enumeration.

    Lists k-cliques along the degeneracy orientation and keeps those with an
    empty common neighborhood. Returns ``(count, cliques)`` where ``cliques``
    is a ``(count, k)`` array of sorted ids when ``emit`` is set, else ``None``.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if k == 1:
        iso = np.flatnonzero(g.degree() == 0)
        return len(iso), (iso.reshape(-1, 1) if emit else None)
    order = g.degeneracy_order()
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    if g.m:
        e = g.edges
        flip = rank[e[:, 0]] > rank[e[:, 1]]
        src = np.where(flip, e[:, 1], e[:, 0])
        dst = np.where(flip, e[:, 0], e[:, 1])
        o = np.lexsort((dst, src))
        src, dst = src[o], dst[o]
    else:
        src = dst = np.empty(0, dtype=np.int64)
    out_ptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=g.n))]).astype(np.int64)
    out_idx = np.ascontiguousarray(dst, dtype=np.int64)
    max_out = int(np.diff(out_ptr).max(initial=0))
    dummy = np.empty((0, k), dtype=np.int64)
    count = _kernels.maximal_k_cliques(g.indptr, g.indices, out_ptr, out_idx, k, max_out, False, dummy)
    if not emit:
        return int(count), None
    out = np.empty((count, k), dtype=np.int64)
    _kernels.maximal_k_cliques(g.indptr, g.indices, out_ptr, out_idx, k, max_out, True, out)
    out.sort(axis=1)
    return int(count), out
