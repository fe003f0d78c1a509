"""Diameter and long cycles in a connected component view."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import GuardError
from .view import ComponentView

EXACT_DIAMETER_MAX = 100_000
LONGRANGE_COLUMNS = ["graph", "eps", "seed", "giant_size", "diameter", "exact", "cycle", "budget"]

__all__ = ["DiameterResult", "CycleResult", "diameter", "longest_cycle", "verify_cycle", "two_core", "LONGRANGE_COLUMNS"]


@dataclass(frozen=True)
class DiameterResult:
    value: int
    exact: bool  # False: value is a lower bound

    def __int__(self):
        return self.value


def diameter(view: ComponentView, mode: str = "exact", k: int = 4, seed=0) -> DiameterResult:
    """Exact diameter (BFS from every vertex) or a double-sweep lower bound from ``k`` seeds."""
    if view.size == 0:
        raise ValueError("empty view")
    if mode == "exact":
        if view.size > EXACT_DIAMETER_MAX:
            raise GuardError(f"exact diameter limited to {EXACT_DIAMETER_MAX} vertices, view has {view.size}")
        ecc = _kernels.all_eccentricities(view.indptr, view.indices)
        if np.any(ecc < 0):
            raise ValueError("view is not connected")
        return DiameterResult(int(ecc.max()), True)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(max(1, k)):
        v = int(rng.integers(view.size))
        # iterate sweeps while the eccentricity keeps growing
        last = -1
        while True:
            dist = _kernels.bfs_distances(view.indptr, view.indices, v)
            if np.any(dist < 0):
                raise ValueError("view is not connected")
            far = int(dist.max())
            best = max(best, far)
            if far <= last:
                break
            last = far
            v = int(np.argmax(dist))
    return DiameterResult(best, False)


@dataclass(frozen=True)
class CycleResult:
    length: int
    cycle: list[int]  # local ids, closing edge implied
    restarts: int


def verify_cycle(view: ComponentView, cycle) -> bool:
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    return all(view.has_edge(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle)))


def _grow_path(view: ComponentView, rng, max_rotations: int):
    """One randomized DFS path with Posa rotations; returns the best cycle seen on the way."""
    n = view.size
    start = int(rng.integers(n))
    path = [start]
    pos = np.full(n, -1, dtype=np.int64)
    pos[start] = 0
    best: list[int] = []
    rotations = 0
    while True:
        end = path[-1]
        nb = view.neighbors(end)
        fresh = nb[pos[nb] < 0]
        # any back edge closes a cycle path[i..end]
        back = nb[pos[nb] >= 0]
        if len(back):
            i = int(pos[back].min())
            if len(path) - i >= 3 and len(path) - i > len(best):
                best = path[i:]
        if len(fresh):
            # prefer the unvisited neighbour with fewest unvisited neighbours (Warnsdorff)
            cand = fresh[rng.permutation(len(fresh))]
            scores = [int(np.count_nonzero(pos[view.neighbors(int(w))] < 0)) for w in cand]
            w = int(cand[int(np.argmin(scores))])
            pos[w] = len(path)
            path.append(w)
            continue
        if rotations >= max_rotations or len(back) < 2:
            break
        # rotation: pick a path neighbour u = path[i] (not the predecessor), reverse path[i+1:]
        choices = [int(pos[u]) for u in back if pos[u] < len(path) - 2]
        if not choices:
            break
        i = choices[int(rng.integers(len(choices)))]
        tail = path[i + 1 :][::-1]
        path[i + 1 :] = tail
        for j in range(i + 1, len(path)):
            pos[path[j]] = j
        rotations += 1
    return best


def two_core(view: ComponentView) -> np.ndarray:
    """Local ids surviving repeated removal of vertices of degree <= 1."""
    deg = view.degrees.astype(np.int64).copy()
    alive = np.ones(view.size, dtype=bool)
    stack = list(np.flatnonzero(deg <= 1))
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for w in view.neighbors(v):
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(int(w))
    return np.flatnonzero(alive)


def _dfs_cycle(view: ComponentView, rng):
    """Longest fundamental cycle of a randomized DFS tree."""
    n = view.size
    depth = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    root = int(rng.integers(n))
    depth[root] = 0
    stack = [(root, iter(rng.permutation(view.neighbors(root)).tolist()))]
    best_len, best_pair = 0, None
    while stack:
        v, it = stack[-1]
        for w in it:
            if depth[w] < 0:
                depth[w] = depth[v] + 1
                parent[w] = v
                stack.append((w, iter(rng.permutation(view.neighbors(w)).tolist())))
                break
            if w != parent[v] and depth[w] < depth[v]:
                length = int(depth[v] - depth[w]) + 1
                if length > best_len:
                    best_len, best_pair = length, (v, w)
        else:
            stack.pop()
    if best_pair is None:
        return []
    v, w = best_pair
    cyc = [v]
    while cyc[-1] != w:
        cyc.append(int(parent[cyc[-1]]))
    return cyc


def longest_cycle(view: ComponentView, budget: int = 50, seed=0, max_rotations: int | None = None) -> CycleResult:
    """Heuristic lower bound on the circumference: best verified cycle over ``budget`` restarts.

    Works on the 2-core, where every cycle lives.  Each restart runs a
    randomized DFS and closes its longest back-edge cycle, then grows a path
    greedily from a random vertex, closing cycles through back edges at the
    current end and applying Posa rotations when stuck.  Trees give 0.
    """
    if view.size == 0:
        raise ValueError("empty view")
    if view.edge_count <= view.size - 1:
        return CycleResult(0, [], 0)
    core_ids = two_core(view)
    core = view.induced(core_ids)
    rng = np.random.default_rng(seed)
    if max_rotations is None:
        max_rotations = min(4 * core.size, 200)
    best: list[int] = []
    for _ in range(budget):
        for c in (_dfs_cycle(core, rng), _grow_path(core, rng, max_rotations)):
            if len(c) > len(best):
                best = [int(x) for x in c]
    best = [int(core_ids[x]) for x in best]
    if best and not verify_cycle(view, best):
        raise AssertionError("reported cycle failed edge-by-edge verification")
    return CycleResult(len(best), best, budget)
