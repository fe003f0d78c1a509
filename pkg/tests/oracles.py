"""Slow, independent reference implementations used by the tests."""

from collections import deque
from functools import lru_cache

import networkx as nx
import numpy as np


def random_tree(n, rng, kind="uniform"):
    """Adjacency lists of a random tree on 0..n-1 (uniform labelled or random recursive)."""
    if kind == "uniform":
        g = nx.random_labeled_tree(n, seed=int(rng.integers(2**31)))
        return [sorted(g.neighbors(v)) for v in range(n)]
    adj = [[] for _ in range(n)]
    perm = rng.permutation(n)
    for i in range(1, n):
        a, b = int(perm[i]), int(perm[rng.integers(i)])
        adj[a].append(b)
        adj[b].append(a)
    return adj


def tree_decomposition_violations(adj, parts, ell):
    """List of violated invariants: cover, connectivity, overlap, size."""
    n = len(adj)
    bad = []
    mult = np.zeros(n, dtype=np.int64)
    for p in parts:
        mult[np.asarray(p, dtype=np.int64)] += 1
    if np.any(mult == 0):
        bad.append("cover")
    for i, p in enumerate(parts):
        ps = set(p)
        if len(ps) != len(p):
            bad.append(f"duplicate in part {i}")
        if not ell <= len(ps) <= 3 * ell:
            bad.append(f"size {len(ps)} of part {i}")
        start = p[0]
        seen = {start}
        q = deque([start])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if w in ps and w not in seen:
                    seen.add(w)
                    q.append(w)
        if len(seen) != len(ps):
            bad.append(f"part {i} disconnected")
        shared = sum(1 for v in p if mult[v] > 1)
        if shared > 1:
            bad.append(f"part {i} shares {shared} vertices")
    return bad


def brute_matching(nl, nr, edges):
    """Maximum matching by memoised search over left vertices and a used-right bitmask."""
    adj = [[] for _ in range(nl)]
    for a, b in edges:
        adj[a].append(b)

    @lru_cache(maxsize=None)
    def best(i, used):
        if i == nl:
            return 0
        out = best(i + 1, used)
        for b in adj[i]:
            if not (used >> b) & 1:
                out = max(out, 1 + best(i + 1, used | (1 << b)))
        return out

    return best(0, 0)


def layered_paths_bruteforce(g: nx.Graph, A, B, maxlen):
    """Max number of vertex-disjoint A-B paths that climb breadth layers from A, by exhaustive packing."""
    A, B = set(A), set(B)
    dist = {a: 0 for a in A}
    frontier = list(A)
    for layer in range(maxlen):
        nxt = []
        for u in frontier:
            if u in B:
                continue
            for w in g.neighbors(u):
                if w not in dist:
                    dist[w] = layer + 1
                    nxt.append(w)
        frontier = nxt
    paths = {a: [] for a in A}

    def walk(path):
        u = path[-1]
        if u in B:
            paths[path[0]].append(frozenset(path))
            return
        if len(path) - 1 == maxlen:
            return
        for w in g.neighbors(u):
            if dist.get(w) == dist[u] + 1:
                walk(path + [w])

    for a in A:
        walk([a])
    order = sorted(A)

    @lru_cache(maxsize=None)
    def pack(i, used):
        if i == len(order):
            return 0
        out = pack(i + 1, used)
        for p in paths[order[i]]:
            if not (p & used):
                out = max(out, 1 + pack(i + 1, used | p))
        return out

    return pack(0, frozenset())
