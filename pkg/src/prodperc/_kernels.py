"""Compiled inner loops (numba).  Everything here works on plain arrays."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _find(parent, x):
    # path halving
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def union_find_labels(n, src, dst):
    """Dense component ids, numbered by smallest member vertex."""
    parent = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    for i in range(len(src)):
        a = _find(parent, src[i])
        b = _find(parent, dst[i])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    labels = np.empty(n, dtype=np.int64)
    dense = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        r = _find(parent, v)
        if dense[r] < 0:
            dense[r] = nxt
            nxt += 1
        labels[v] = dense[r]
    return labels, nxt


@njit(cache=True, nogil=True)
def bfs_distances(indptr, indices, source):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True, nogil=True)
def multi_source_bfs(indptr, indices, sources, max_depth):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    tail = 0
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        if dist[u] >= max_depth:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True, nogil=True)
def all_eccentricities(indptr, indices):
    n = len(indptr) - 1
    ecc = np.zeros(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        far = 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = du
                    far = du
                    queue[tail] = w
                    tail += 1
        if tail < n:
            ecc[s] = -1  # disconnected
        else:
            ecc[s] = far
    return ecc


@njit(cache=True, nogil=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def gray_code_profile(nbr_mask, degree):
    """Exact minimum edge boundary for every subset size (n <= 24).

    Walks all 2^n subsets in Gray-code order; each step toggles one vertex
    and updates the boundary in O(1) word operations.
    """
    n = len(nbr_mask)
    best = np.full(n + 1, np.iinfo(np.int64).max, dtype=np.int64)
    witness = np.zeros(n + 1, dtype=np.int64)
    best[0] = 0
    S = 0
    size = 0
    bnd = 0
    total = 1 << n
    for i in range(1, total):
        v = 0
        x = i
        while (x & 1) == 0:
            x >>= 1
            v += 1
        bit = 1 << v
        if S & bit:
            S ^= bit
            size -= 1
            bnd -= degree[v] - 2 * _popcount(S & nbr_mask[v])
        else:
            bnd += degree[v] - 2 * _popcount(S & nbr_mask[v])
            S |= bit
            size += 1
        if bnd < best[size]:
            best[size] = bnd
            witness[size] = S
    return best, witness


@njit(cache=True, nogil=True)
def connected_set_conductance(nbr_mask, degree, levels):
    """Exact Phi(2^-j) over connected proper subsets (n <= 20).

    Returns per-level minimum conductance (``inf`` if no set qualifies) and
    the minimizing bitmask.  Level membership is decided in exact integer
    arithmetic: ``2^-(j+1) <= vol(S)/vol(V) <= 2^-j``.
    """
    n = len(nbr_mask)
    full = (1 << n) - 1
    vol_total = 0
    for v in range(n):
        vol_total += degree[v]
    connected = np.zeros(1 << n, dtype=np.bool_)
    best = np.full(levels, np.inf)
    best_mask = np.zeros(levels, dtype=np.int64)
    for S in range(1, full):
        if (S & (S - 1)) == 0:
            connected[S] = True
        else:
            ok = False
            x = S
            while x:
                low = x & (-x)
                x ^= low
                v = 0
                y = low
                while y > 1:
                    y >>= 1
                    v += 1
                rest = S ^ low
                if connected[rest] and (nbr_mask[v] & rest) != 0:
                    ok = True
                    break
            connected[S] = ok
        if not connected[S]:
            continue
        vol = 0
        cut = 0
        x = S
        while x:
            low = x & (-x)
            x ^= low
            v = 0
            y = low
            while y > 1:
                y >>= 1
                v += 1
            vol += degree[v]
            cut += _popcount(nbr_mask[v] & ~S & full)
        phi = cut / (2.0 * vol * (1.0 - vol / vol_total))
        for j in range(1, levels + 1):
            if vol * (1 << j) <= vol_total and vol * (1 << (j + 1)) >= vol_total:
                if phi < best[j - 1]:
                    best[j - 1] = phi
                    best_mask[j - 1] = S
    return best, best_mask
