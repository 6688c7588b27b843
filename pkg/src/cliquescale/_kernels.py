"""Numba kernels for the hot loops.

Bitset kernels assume the graph has been relabeled so that vertex ``i`` is the
``i``-th vertex of a degeneracy ordering; the outer Bron-Kerbosch loop then
runs over vertex ids in increasing order.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba.cpython.unsafe.numbers import trailing_zeros

_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True)
def csr_from_sorted_edges(n, edges, indptr, indices):
    """Fill ``indices`` from lexicographically sorted ``u < v`` edges.

    Each row lists the lower neighbors (in edge order, hence increasing)
    followed by the higher ones, so rows come out sorted.
    """
    m = edges.shape[0]
    low = np.zeros(n, dtype=np.int64)
    for e in range(m):
        low[edges[e, 1]] += 1
    pos = indptr[:-1].copy()
    for e in range(m):
        v = edges[e, 1]
        indices[pos[v]] = edges[e, 0]
        pos[v] += 1
    for e in range(m):
        u = edges[e, 0]
        indices[pos[u]] = edges[e, 1]
        pos[u] += 1


@njit(cache=True)
def degeneracy_order_csr(n, indptr, indices):
    """Smallest-last ordering by bucket elimination, O(n + m)."""
    deg = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    bin_start = np.zeros(maxdeg + 2, dtype=np.int64)
    for v in range(n):
        bin_start[deg[v] + 1] += 1
    for d in range(1, maxdeg + 2):
        bin_start[d] += bin_start[d - 1]
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    fill = bin_start.copy()
    for v in range(n):
        pos[v] = fill[deg[v]]
        vert[pos[v]] = v
        fill[deg[v]] += 1
    for i in range(n):
        v = vert[i]
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_start[du] += 1
                deg[u] -= 1
    return vert


@njit(cache=True)
def _select_pivot(adj, P, X, words, out):
    # Tomita pivot: maximize |P & N(u)| over u in P | X; writes P & ~N(pivot) to out
    best = -1
    best_cnt = -1
    psize = 0
    for w in range(words):
        psize += _popcount(P[w])
    for w in range(words):
        x = P[w] | X[w]
        while x != 0:
            b = trailing_zeros(x)
            x &= x - _ONE
            u = w * 64 + b
            cnt = 0
            for t in range(words):
                cnt += _popcount(P[t] & adj[u, t])
            if cnt > best_cnt:
                best_cnt = cnt
                best = u
                if cnt == psize:
                    break
        if best_cnt == psize:
            break
    for w in range(words):
        out[w] = P[w] & ~adj[best, w]


@njit(cache=True)
def _small_leaf(adj, P, X, words, size, by_size):
    # maximal cliques R + (subset of P) for |P| in {1, 2}; |R| + 1 == size
    a = -1
    b = -1
    for w in range(words):
        x = P[w]
        while x != 0:
            bit = w * 64 + trailing_zeros(x)
            x &= x - _ONE
            if a < 0:
                a = bit
            else:
                b = bit
    if b < 0:
        for w in range(words):
            if X[w] & adj[a, w] != 0:
                return 0
        by_size[size] += 1
        return 1
    if adj[a, b >> 6] & (_ONE << np.uint64(b & 63)) != 0:
        for w in range(words):
            if X[w] & adj[a, w] & adj[b, w] != 0:
                return 0
        by_size[size + 1] += 1
        return 1
    got = 0
    for t in range(2):
        c = a if t == 0 else b
        ok = True
        for w in range(words):
            if X[w] & adj[c, w] != 0:
                ok = False
                break
        if ok:
            by_size[size] += 1
            got += 1
    return got


@njit(cache=True)
def bk_count_range(adj, v_start, v_end, by_size, budget, max_depth):
    """Pivoted Bron-Kerbosch over outer vertices ``v_start..v_end-1``.

    Adds maximal-clique counts into ``by_size`` (indexed by clique size).
    ``max_depth`` must be at least the largest clique size. Returns
    ``(next_vertex, found)``; ``next_vertex < v_end`` means the ``budget``
    on found cliques was hit while processing ``next_vertex``.
    """
    n, words = adj.shape
    rows = min(n, max_depth) + 1
    P = np.zeros((rows, words), dtype=np.uint64)
    X = np.zeros((rows, words), dtype=np.uint64)
    C = np.zeros((rows, words), dtype=np.uint64)
    state = np.array([v_start, -1], dtype=np.int64)
    found = bk_resume(adj, v_end, by_size, budget, P, X, C, state)
    return state[0], found


@njit(cache=True)
def bk_resume(adj, v_end, by_size, budget, P, X, C, state):
    """Resumable core of :func:`bk_count_range`.

    ``state = [v, d]`` is the current outer vertex and recursion depth
    (``d = -1``: vertex not started). The frame stacks ``P``, ``X``, ``C``
    must be kept between calls. Returns the number of cliques found in this
    call; the run is complete when ``state[0] == v_end``.
    """
    words = adj.shape[1]
    found = 0
    v = state[0]
    d = state[1]
    while v < v_end:
        if d < 0:
            vw = v >> 6
            vb = np.uint64(v & 63)
            p_empty = True
            x_empty = True
            for w in range(words):
                if w < vw:
                    lt = _ALL
                elif w == vw:
                    lt = (_ONE << vb) - _ONE
                else:
                    lt = np.uint64(0)
                gt = ~lt
                if w == vw:
                    gt &= ~(_ONE << vb)
                P[0, w] = adj[v, w] & gt
                X[0, w] = adj[v, w] & lt
                if P[0, w] != 0:
                    p_empty = False
                if X[0, w] != 0:
                    x_empty = False
            if p_empty:
                v += 1
                if x_empty:
                    by_size[1] += 1
                    found += 1
                    if found >= budget:
                        state[0] = v
                        state[1] = -1
                        return found
                continue
            _select_pivot(adj, P[0], X[0], words, C[0])
            d = 0
        while d >= 0:
            u = -1
            for w in range(words):
                c = C[d, w]
                if c != 0:
                    u = w * 64 + trailing_zeros(c)
                    C[d, w] = c & (c - _ONE)
                    break
            if u < 0:
                d -= 1
                continue
            p_empty = True
            x_empty = True
            for w in range(words):
                a = adj[u, w]
                np_ = P[d, w] & a
                nx = X[d, w] & a
                P[d + 1, w] = np_
                X[d + 1, w] = nx
                if np_ != 0:
                    p_empty = False
                if nx != 0:
                    x_empty = False
            uw = u >> 6
            ub = _ONE << np.uint64(u & 63)
            P[d, uw] &= ~ub
            X[d, uw] |= ub
            if p_empty:
                if x_empty:
                    by_size[d + 2] += 1
                    found += 1
                    if found >= budget:
                        state[0] = v
                        state[1] = d
                        return found
                continue
            # one or two candidates left: resolve without another pivot search
            psize = 0
            for w in range(words):
                psize += _popcount(P[d + 1, w])
            if psize <= 2:
                found += _small_leaf(adj, P[d + 1], X[d + 1], words, d + 3, by_size)
                if found >= budget:
                    state[0] = v
                    state[1] = d
                    return found
                continue
            d += 1
            _select_pivot(adj, P[d], X[d], words, C[d])
        v += 1
    state[0] = v
    state[1] = -1
    return found


@njit(cache=True)
def sparse_local_problem(indptr, indices, order, rank, local, i):
    """Bitset graph on ``N(v) + v`` for ``v = order[i]``.

    Local ids list the neighbors earlier in ``order``, then ``v`` (id ``a``),
    then the later neighbors, so outer vertex ``a`` of the local graph has
    exactly the later neighbors as candidates and the earlier ones excluded.
    ``local`` is scratch of length ``n`` filled with -1, restored on return.
    Returns ``(adj, a, b)`` with ``b - a - 1`` later neighbors.
    """
    v = order[i]
    deg = indptr[v + 1] - indptr[v]
    verts = np.empty(deg + 1, dtype=np.int64)
    a = 0
    for j in range(indptr[v], indptr[v + 1]):
        if rank[indices[j]] < i:
            verts[a] = indices[j]
            a += 1
    verts[a] = v
    b = a + 1
    for j in range(indptr[v], indptr[v + 1]):
        if rank[indices[j]] > i:
            verts[b] = indices[j]
            b += 1
    L = deg + 1
    words = (L + 63) // 64
    for t in range(L):
        local[verts[t]] = t
    adj = np.zeros((L, words), dtype=np.uint64)
    for t in range(L):
        x = verts[t]
        dx = indptr[x + 1] - indptr[x]
        if dx <= L:
            for j in range(indptr[x], indptr[x + 1]):
                y = local[indices[j]]
                if y >= 0:
                    adj[t, y >> 6] |= _ONE << np.uint64(y & 63)
        else:
            for y in range(L):
                if y != t and _is_neighbor(indptr, indices, x, verts[y]):
                    adj[t, y >> 6] |= _ONE << np.uint64(y & 63)
    for t in range(L):
        local[verts[t]] = -1
    return adj, a, b


@njit(cache=True)
def bk_count_sparse(indptr, indices, order, rank, local, by_size, budget, i_start, i_end, heavy):
    """Bron-Kerbosch on a sparse graph, one local bitset problem per vertex.

    Handles positions ``i_start..i_end-1`` of ``order`` (``rank`` is its
    inverse; ``local`` is scratch as in :func:`sparse_local_problem`).
    Returns ``(next_position, found, status)``: status 0 when the
    range is done, 1 when ``budget`` was hit at ``next_position``, 2 when
    ``next_position`` has more than ``heavy`` later neighbors and was left
    for the caller to solve in resumable slices.
    """
    found = 0
    for i in range(i_start, i_end):
        v = order[i]
        later = 0
        for j in range(indptr[v], indptr[v + 1]):
            if rank[indices[j]] > i:
                later += 1
        if later > heavy:
            return i, found, 2
        adj, a, b = sparse_local_problem(indptr, indices, order, rank, local, i)
        nxt, f = bk_count_range(adj, a, a + 1, by_size, budget - found, b - a + 1)
        found += f
        if nxt <= a:
            return i, found, 1
        if found >= budget:
            return i + 1, found, 1
    return i_end, found, 0


@njit(cache=True)
def _is_neighbor(indptr, indices, u, x):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and indices[lo] == x


@njit(cache=True)
def _is_maximal(indptr, indices, clique, k):
    # true iff no vertex outside clique is adjacent to all of it
    best = clique[0]
    for i in range(1, k):
        c = clique[i]
        if indptr[c + 1] - indptr[c] < indptr[best + 1] - indptr[best]:
            best = c
    for j in range(indptr[best], indptr[best + 1]):
        x = indices[j]
        ok = True
        for i in range(k):
            c = clique[i]
            if c == best:
                continue
            if c == x or not _is_neighbor(indptr, indices, c, x):
                ok = False
                break
        if ok:
            return False
    return True


@njit(cache=True)
def maximal_k_cliques(indptr, indices, out_ptr, out_idx, k, max_out, emit, out):
    """Count (and with ``emit`` write into ``out``) maximal cliques of size ``k >= 2``.

    ``out_ptr``/``out_idx`` hold each vertex's neighbors of higher rank,
    sorted by id; every k-clique is then listed exactly once.
    """
    n = len(indptr) - 1
    cand = np.empty((k + 1, max_out + 1), dtype=np.int64)
    cnt = np.zeros(k + 1, dtype=np.int64)
    pos = np.zeros(k + 1, dtype=np.int64)
    clique = np.empty(k, dtype=np.int64)
    found = 0
    for v in range(n):
        clique[0] = v
        m = out_ptr[v + 1] - out_ptr[v]
        for i in range(m):
            cand[1, i] = out_idx[out_ptr[v] + i]
        cnt[1] = m
        pos[1] = 0
        lev = 1
        while lev >= 1:
            if pos[lev] >= cnt[lev]:
                lev -= 1
                continue
            u = cand[lev, pos[lev]]
            pos[lev] += 1
            clique[lev] = u
            if lev == k - 1:
                if _is_maximal(indptr, indices, clique, k):
                    if emit:
                        for i in range(k):
                            out[found, i] = clique[i]
                    found += 1
                continue
            # cand[lev+1] = cand[lev] intersect out(u); both sorted by id, and
            # out(u) alone fixes the rank order, so scan all of cand[lev]
            a = 0
            b = out_ptr[u]
            be = out_ptr[u + 1]
            c = 0
            while a < cnt[lev] and b < be:
                x = cand[lev, a]
                y = out_idx[b]
                if x < y:
                    a += 1
                elif y < x:
                    b += 1
                else:
                    cand[lev + 1, c] = x
                    c += 1
                    a += 1
                    b += 1
            cnt[lev + 1] = c
            pos[lev + 1] = 0
            if c >= k - 1 - lev:
                lev += 1
    return found


@njit(cache=True)
def chung_lu_skip(w, total, unif, edges):
    """Geometric-skip sampler for ``p_ij = min(w_i w_j / total, 1)``.

    ``w`` must be sorted in decreasing order. Uniforms are consumed from
    ``unif`` in a fixed order, so rerunning with a longer buffer that
    extends the same stream reproduces the same graph. Returns
    ``(status, m)`` with status 0 = done, 1 = uniforms exhausted,
    2 = edge buffer full.
    """
    n = len(w)
    t = 0
    m = 0
    nu = len(unif)
    cap = edges.shape[0]
    for i in range(n - 1):
        j = i + 1
        p = min(w[i] * w[j] / total, 1.0)
        while j < n and p > 0.0:
            if p < 1.0:
                if t >= nu:
                    return 1, m
                r = 1.0 - unif[t]
                t += 1
                j += int(np.floor(np.log(r) / np.log1p(-p)))
            if j < n:
                q = min(w[i] * w[j] / total, 1.0)
                if t >= nu:
                    return 1, m
                r = unif[t]
                t += 1
                if r < q / p:
                    if m >= cap:
                        return 2, m
                    edges[m, 0] = i
                    edges[m, 1] = j
                    m += 1
                p = q
                j += 1
    return 0, m
