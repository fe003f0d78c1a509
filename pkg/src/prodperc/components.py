"""Component labeling, giant statistics and the survival-probability fixed point."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .graph import ProductGraph
from .percolation import EdgeSample

__all__ = [
    "ComponentLabeling",
    "GiantStats",
    "survival_fraction",
    "label_components",
    "giant_stats",
    "attached_decorations",
    "DecorationSizes",
]


def survival_fraction(eps: float, tol: float = 1e-12) -> float:
    """Root in (0, 1) of ``y = 1 - exp(-(1 + eps) y)``, by bisection.

    The bracket starts at 1e-9 to stay clear of the trivial root ``y = 0``.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    c = 1.0 + eps

    def f(y):
        return y - 1.0 + math.exp(-c * y)

    lo, hi = 1e-9, 1.0
    if f(lo) >= 0:
        raise ValueError(f"eps={eps} too small: positive root lies below the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    if abs(f(y)) > tol:
        raise ArithmeticError(f"bisection residual {f(y):.3g} above {tol}")
    return y


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    """Vertex -> component id, with ids numbered by smallest member vertex."""

    labels: np.ndarray
    sizes: np.ndarray  # indexed by component id
    edge_counts: np.ndarray  # retained edges inside each component
    sample: EdgeSample | None = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.sizes)

    @cached_property
    def sizes_desc(self) -> np.ndarray:
        return np.sort(self.sizes)[::-1]

    @cached_property
    def giant(self) -> int:
        # argmax returns the first maximum, i.e. the smallest id on ties
        return int(np.argmax(self.sizes))

    @property
    def giant_size(self) -> int:
        return int(self.sizes[self.giant])

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cid)

    def giant_vertices(self) -> np.ndarray:
        return self.members(self.giant)


@dataclass(frozen=True)
class GiantStats:
    n: int
    giant_size: int
    fraction: float
    second_size: int
    giant_edges: int
    excess: int


def label_components(G: ProductGraph, s: EdgeSample) -> ComponentLabeling:
    """Union-find (path halving, union by size) over the retained edges."""
    src, dst = s.endpoints
    labels, k = _kernels.union_find_labels(G.n, src.astype(np.int64), dst.astype(np.int64))
    sizes = np.bincount(labels, minlength=k)
    ls, ld = labels[src], labels[dst]
    cross = int(np.count_nonzero(ls != ld))
    if cross:
        raise AssertionError(f"{cross} retained edges join different components")
    edge_counts = np.bincount(ls, minlength=k)
    return ComponentLabeling(labels, sizes, edge_counts, s)


def giant_stats(lab: ComponentLabeling) -> GiantStats:
    n = int(lab.sizes.sum())
    g = lab.giant
    second = int(lab.sizes_desc[1]) if lab.count > 1 else 0
    e1 = int(lab.edge_counts[g])
    size = int(lab.sizes[g])
    return GiantStats(
        n=n,
        giant_size=size,
        fraction=size / n,
        second_size=second,
        giant_edges=e1,
        excess=e1 - (size - 1),
    )


@dataclass(frozen=True)
class DecorationSizes:
    vertices: np.ndarray  # vertices of the early giant
    sizes: np.ndarray  # |C_v| per vertex, aligned with ``vertices``

    @property
    def max(self) -> int:
        return int(self.sizes.max()) if len(self.sizes) else 0

    def distribution(self) -> dict[int, int]:
        vals, counts = np.unique(self.sizes, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}


def attached_decorations(G: ProductGraph, s_base: EdgeSample, s_merged: EdgeSample) -> DecorationSizes:
    """Sizes of the residue pieces hanging off each early-giant vertex.

    The early giant is the giant of ``s_base``.  For each of its vertices v,
    ``C_v`` is the union of the components of ``s_merged`` minus the early
    giant that contain a ``s_merged``-neighbour of v.
    """
    if s_base.graph is not G or s_merged.graph is not G:
        raise ValueError("samples must be drawn on G")
    if np.any(s_base.mask & ~s_merged.mask):
        raise ValueError("base sample is not contained in the merged sample")
    base_lab = label_components(G, s_base)
    in_giant = base_lab.labels == base_lab.giant
    src, dst = s_merged.endpoints
    outside = ~in_giant[src] & ~in_giant[dst]
    res_labels, k = _kernels.union_find_labels(
        G.n, src[outside].astype(np.int64), dst[outside].astype(np.int64)
    )
    res_sizes = np.bincount(res_labels, minlength=k)
    # edges from the early giant into the residue
    a = np.concatenate((src, dst))
    b = np.concatenate((dst, src))
    hook = in_giant[a] & ~in_giant[b]
    v_side = a[hook].astype(np.int64)
    comp = res_labels[b[hook]]
    pairs = np.unique(v_side * k + comp)
    pv, pc = pairs // k, pairs % k
    per_vertex = np.bincount(pv, weights=res_sizes[pc], minlength=G.n).astype(np.int64)
    verts = np.flatnonzero(in_giant)
    return DecorationSizes(verts, per_vertex[verts])
