"""Local, re-indexed view of one connected piece of a percolated graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .graph import ProductGraph, _csr
from .percolation import EdgeSample

__all__ = ["ComponentView", "giant_view", "component_view"]


@dataclass(frozen=True, eq=False)
class ComponentView:
    """CSR over local ids ``0..size-1``; ``vertices[i]`` is the global id of local i."""

    vertices: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    graph: ProductGraph | None = field(default=None, repr=False)
    sample: EdgeSample | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return self.size

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return int(self.indptr[-1]) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @cached_property
    def local_index(self) -> dict[int, int]:
        return {int(v): i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_list(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.size), self.degrees)
        keep = src < self.indices
        return src[keep], self.indices[keep].astype(np.int64)

    def is_connected(self) -> bool:
        if self.size == 0:
            return False
        return bool(np.all(_kernels.bfs_distances(self.indptr, self.indices, 0) >= 0))

    def has_edge(self, a: int, b: int) -> bool:
        nb = self.neighbors(a)
        i = np.searchsorted(nb, b)
        return bool(i < len(nb) and nb[i] == b)

    def induced(self, local_vertices) -> "ComponentView":
        """Sub-view on a subset of local ids (re-indexed again)."""
        keep = np.zeros(self.size, dtype=bool)
        keep[np.asarray(local_vertices, dtype=np.int64)] = True
        src, dst = self.edge_list
        ok = keep[src] & keep[dst]
        remap = np.cumsum(keep) - 1
        indptr, indices = _csr(int(keep.sum()), remap[src[ok]], remap[dst[ok]])
        return ComponentView(self.vertices[keep], indptr, indices.astype(np.int64), self.graph, self.sample)

    @classmethod
    def from_edges(cls, n: int, edges) -> "ComponentView":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        indptr, indices = _csr(n, e[:, 0], e[:, 1])
        return cls(np.arange(n, dtype=np.int64), indptr, indices.astype(np.int64))

    @classmethod
    def from_networkx(cls, g) -> "ComponentView":
        nodes = sorted(g.nodes())
        pos = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), [(pos[a], pos[b]) for a, b in g.edges()])


def component_view(s: EdgeSample, vertices) -> ComponentView:
    """View of the retained subgraph induced on ``vertices`` (global ids)."""
    G = s.graph
    verts = np.sort(np.asarray(vertices, dtype=np.int64))
    keep = np.zeros(G.n, dtype=bool)
    keep[verts] = True
    src, dst = s.endpoints
    ok = keep[src] & keep[dst]
    local = np.full(G.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    indptr, indices = _csr(len(verts), local[src[ok]], local[dst[ok]])
    return ComponentView(verts, indptr, indices.astype(np.int64), G, s)


def giant_view(s: EdgeSample, labeling=None) -> ComponentView:
    from .components import label_components

    lab = labeling if labeling is not None else label_components(s.graph, s)
    return component_view(s, lab.giant_vertices())


def approx_fiedler(view: ComponentView, iters: int = 300, rng=None) -> np.ndarray:
    """Approximate second eigenvector of the lazy walk, by deflated power iteration.

    Iterates ``x <- P x`` for the lazy walk ``P = (I + D^-1 A) / 2`` while
    projecting out the constant vector in the ``pi``-weighted inner product.
    Only the induced vertex ordering is used downstream.
    """
    import scipy.sparse as sp

    rng = np.random.default_rng(rng)
    n = view.size
    if n < 2:
        return np.zeros(n)
    deg = view.degrees.astype(float)
    deg[deg == 0] = 1.0
    A = sp.csr_matrix((np.ones(len(view.indices)), view.indices, view.indptr), shape=(n, n))
    pi = deg / deg.sum()
    x = rng.standard_normal(n)
    for _ in range(iters):
        x -= np.dot(pi, x)
        x = 0.5 * (x + (A @ x) / deg)
        norm = np.linalg.norm(x)
        if norm == 0:
            break
        x /= norm
    x -= np.dot(pi, x)
    return x
