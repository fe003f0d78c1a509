"""Edge/vertex boundaries, exact isoperimetric profiles and the entropy inequalities.

The two lower bounds on ``i_k(G) = min_{|S|=k} |boundary(S)| / k`` are

* regular factors:    ``d - (C - 1) log2 k``
* connected factors:  ``log_C(n / k) / (C - 1)``

where ``C`` is the largest base order.  :func:`exact_iso_profile` computes the
true profile by exhaustive Gray-code enumeration for ``n <= 24`` so both can
be checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels
from .graph import GuardError, ProductGraph
from .percolation import EdgeSample

EXACT_PROFILE_MAX_N = 24
TREE_COUNT_MAX_N = 64
TREE_COUNT_MAX_K = 6
LOG_TOL = 1e-9

__all__ = [
    "VertexSubset",
    "IsoProfile",
    "DistributionOverC",
    "edge_boundary",
    "vertex_neighborhood",
    "exact_iso_profile",
    "iso_profile_by_combinations",
    "iso_bound_regular",
    "iso_bound_connected",
    "check_entropy_floor",
    "check_weighted_log_inequality",
    "count_trees",
    "entropy",
]


@dataclass(frozen=True, eq=False)
class VertexSubset:
    graph: ProductGraph
    members: np.ndarray = field(repr=False)  # bool mask of length n

    def __post_init__(self):
        if self.members.dtype != bool or len(self.members) != self.graph.n:
            raise ValueError("membership must be a boolean mask over all vertices")

    @classmethod
    def of(cls, G: ProductGraph, vertices) -> "VertexSubset":
        m = np.zeros(G.n, dtype=bool)
        m[np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices, dtype=np.int64)] = True
        return cls(G, m)

    @classmethod
    def from_bitmask(cls, G: ProductGraph, bits: int) -> "VertexSubset":
        return cls(G, np.array([(bits >> v) & 1 for v in range(G.n)], dtype=bool))

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.members))

    def __len__(self) -> int:
        return self.size

    def vertices(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    def complement(self) -> "VertexSubset":
        return VertexSubset(self.graph, ~self.members)

    def to_bitmask(self) -> int:
        return sum(1 << int(v) for v in self.vertices())


def _edge_arrays(G: ProductGraph, s: EdgeSample | None):
    if s is None:
        return G.edges.src, G.edges.dst
    if s.graph is not G:
        raise ValueError("sample was drawn on a different graph")
    return s.endpoints


def edge_boundary(G: ProductGraph, s: EdgeSample | None, S: VertexSubset) -> int:
    """Edges with exactly one endpoint in S (retained edges only if ``s`` given)."""
    src, dst = _edge_arrays(G, s)
    m = S.members
    return int(np.count_nonzero(m[src] != m[dst]))


def vertex_neighborhood(G: ProductGraph, s: EdgeSample | None, S: VertexSubset, r: int = 1) -> int:
    """Number of vertices outside S within distance r of S."""
    if r < 1:
        raise ValueError("r must be >= 1")
    indptr, indices = G.adjacency if s is None else s.adjacency
    sources = S.vertices().astype(np.int64)
    if len(sources) == 0:
        return 0
    dist = _kernels.multi_source_bfs(indptr, indices, sources, r)
    return int(np.count_nonzero(dist > 0))


@dataclass(frozen=True, eq=False)
class IsoProfile:
    """Exact minimum boundaries ``min_boundary[k]`` with one witness bitmask per k."""

    graph: ProductGraph
    min_boundary: np.ndarray  # index k = 0..k_max
    witnesses: list[int] = field(repr=False)

    @property
    def k_max(self) -> int:
        return len(self.min_boundary) - 1

    def i_k(self, k: int) -> float:
        return float(self.min_boundary[k]) / k

    def witness(self, k: int) -> VertexSubset:
        return VertexSubset.from_bitmask(self.graph, self.witnesses[k])

    def rows(self) -> list[dict]:
        G = self.graph
        out = []
        for k in range(1, self.k_max + 1):
            out.append(
                {
                    "k": k,
                    "min_boundary": int(self.min_boundary[k]),
                    "i_k": repr(self.i_k(k)),
                    "bound_regular": repr(iso_bound_regular(G, k)) if G.is_regular else "",
                    "bound_connected": repr(iso_bound_connected(G, k)),
                    "witness": format(self.witnesses[k], "x"),
                }
            )
        return out


PROFILE_COLUMNS = ["k", "min_boundary", "i_k", "bound_regular", "bound_connected", "witness"]


def _neighbor_masks(G: ProductGraph) -> tuple[np.ndarray, np.ndarray]:
    indptr, indices = G.adjacency
    masks = np.zeros(G.n, dtype=np.int64)
    for v in range(G.n):
        for w in indices[indptr[v] : indptr[v + 1]]:
            masks[v] |= 1 << int(w)
    return masks, np.diff(indptr).astype(np.int64)


def exact_iso_profile(G: ProductGraph, k_max: int | None = None) -> IsoProfile:
    """Exact ``min |boundary(S)|`` over all k-subsets, ``1 <= k <= k_max``."""
    if G.n > EXACT_PROFILE_MAX_N:
        raise GuardError(
            f"exact isoperimetric profile enumerates 2^n subsets; n={G.n} exceeds {EXACT_PROFILE_MAX_N}"
        )
    k_max = G.n if k_max is None else k_max
    if not 1 <= k_max <= G.n:
        raise ValueError(f"k_max must be in [1, {G.n}]")
    masks, degree = _neighbor_masks(G)
    best, witness = _kernels.gray_code_profile(masks, degree)
    return IsoProfile(G, best[: k_max + 1].copy(), [int(w) for w in witness[: k_max + 1]])


def iso_profile_by_combinations(G: ProductGraph, k_max: int) -> list[int]:
    """Per-k brute force over ``itertools.combinations``; a slow independent oracle."""
    edges = list(zip(G.edges.src.tolist(), G.edges.dst.tolist()))
    out = [0]
    for k in range(1, k_max + 1):
        best = None
        for S in combinations(range(G.n), k):
            inside = set(S)
            b = sum((u in inside) != (v in inside) for u, v in edges)
            if best is None or b < best:
                best = b
        out.append(best)
    return out


def iso_bound_regular(G: ProductGraph, k: int) -> float:
    if not G.is_regular:
        raise ValueError("the regular-factor bound needs every base graph to be regular")
    if not 1 <= k <= G.n:
        raise ValueError(f"k must be in [1, {G.n}]")
    return G.d - (G.C - 1) * math.log2(k)


def iso_bound_connected(G: ProductGraph, k: int) -> float:
    if not 1 <= k <= G.n:
        raise ValueError(f"k must be in [1, {G.n}]")
    return math.log(G.n / k, G.C) / (G.C - 1)


# entropy inequalities


@dataclass(frozen=True)
class DistributionOverC:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if len(p) < 2:
            raise ValueError("need C >= 2 outcomes")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")

    @property
    def C(self) -> int:
        return len(self.probabilities)


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def entropy(p) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    return float(-_xlog2x(p).sum())


def check_entropy_floor(dist: DistributionOverC | list | tuple | np.ndarray) -> tuple[float, float, bool]:
    """``(H, floor, holds)`` for ``C/(C-1) (1 - max p) <= H(X)``."""
    if not isinstance(dist, DistributionOverC):
        dist = DistributionOverC(tuple(float(x) for x in dist))
    p = np.sort(np.asarray(dist.probabilities, dtype=float))
    C = len(p)
    H = entropy(p)
    floor = C / (C - 1) * (1.0 - p[-1])
    return H, floor, floor <= H + LOG_TOL


def check_weighted_log_inequality(k_list) -> bool:
    """``C/(C-1)(k - k_C) + sum k_i log2 k_i <= k log2 k`` with ``k_C = max k_i``."""
    ks = np.sort(np.asarray(k_list, dtype=float))
    if np.any(ks < 0):
        raise ValueError("entries must be nonnegative")
    C = len(ks)
    if C < 2:
        raise ValueError("need C >= 2 entries")
    k = ks.sum()
    lhs = C / (C - 1) * (k - ks[-1]) + _xlog2x(ks).sum()
    rhs = float(_xlog2x(np.array([k]))[0])
    return lhs <= rhs + LOG_TOL * max(1.0, abs(rhs))


# tree counts


def _det_int(mat: list[list[int]]) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    a = [row[:] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i] != 0:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def _connected_subsets(adj: list[set[int]], k: int):
    level = {frozenset([v]) for v in range(len(adj))}
    for _ in range(k - 1):
        nxt = set()
        for S in level:
            frontier = set().union(*(adj[v] for v in S)) - S
            for w in frontier:
                nxt.add(S | {w})
        level = nxt
    return level


def count_trees(G: ProductGraph, k: int) -> int:
    """Number of k-vertex trees that are subgraphs of G (matrix-tree theorem per connected k-set)."""
    if G.n > TREE_COUNT_MAX_N or not 1 <= k <= TREE_COUNT_MAX_K:
        raise GuardError(f"tree counting needs n <= {TREE_COUNT_MAX_N} and 1 <= k <= {TREE_COUNT_MAX_K}")
    if k > G.n:
        return 0
    adj = [set(G.neighbors(v)) for v in range(G.n)]
    total = 0
    for S in _connected_subsets(adj, k):
        verts = sorted(S)
        pos = {v: i for i, v in enumerate(verts)}
        lap = [[0] * k for _ in range(k)]
        for v in verts:
            for w in adj[v]:
                if w in pos:
                    lap[pos[v]][pos[v]] += 1
                    lap[pos[v]][pos[w]] -= 1
        total += _det_int([row[1:] for row in lap[1:]])
    return total
