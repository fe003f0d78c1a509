"""Cartesian product graphs with mixed-radix vertex ids and canonical edge ids.

A vertex of ``G = G1 x ... x Gt`` is a coordinate vector ``(v_1, ..., v_t)``
stored as the dense integer ``sum_j v_j * strides[j]`` with
``strides[j] = prod_{i<j} |V(G_i)|``.  Coordinates are decoded on demand, so
no per-vertex storage is needed beyond what an algorithm asks for.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .expr import DEFAULT_C_MAX, Atom, GraphSpec, parse_graph_expr

DEFAULT_MAX_VERTICES = 2**26
ADJACENCY_CACHE_LIMIT = 10**5

__all__ = [
    "BaseGraph",
    "ProductGraph",
    "EdgeIndexing",
    "GuardError",
    "build_product",
    "graph",
    "neighbors",
    "vertex_codec",
    "enumerate_edges",
    "load_base_graph",
]


class GuardError(RuntimeError):
    """A configured size/resource guard refused the request."""


@dataclass(frozen=True)
class BaseGraph:
    """A small connected simple graph used as a product factor."""

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise ValueError("adjacency length does not match vertex_count")
        for u, nbrs in enumerate(self.adjacency):
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"multi-edge at base vertex {u}")
            for w in nbrs:
                if w == u:
                    raise ValueError(f"loop at base vertex {u}")
                if not 0 <= w < self.vertex_count or u not in self.adjacency[w]:
                    raise ValueError(f"asymmetric adjacency at edge ({u}, {w})")
        if not _is_connected(self.adjacency):
            raise ValueError(f"base graph {self.name or '?'} is not connected")

    @property
    def regular_degree(self) -> int | None:
        degs = {len(a) for a in self.adjacency}
        return degs.pop() if len(degs) == 1 else None

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, w) for u, nbrs in enumerate(self.adjacency) for w in nbrs if u < w]

    @classmethod
    def from_edges(cls, n: int, edges, name: str = "") -> "BaseGraph":
        adj = [set() for _ in range(n)]
        for u, w in edges:
            if u == w:
                raise ValueError(f"loop at base vertex {u}")
            if (w in adj[u]) or not (0 <= u < n and 0 <= w < n):
                raise ValueError(f"invalid or repeated edge ({u}, {w})")
            adj[u].add(w)
            adj[w].add(u)
        return cls(n, tuple(tuple(sorted(a)) for a in adj), name)

    @classmethod
    def complete(cls, n: int) -> "BaseGraph":
        return cls.from_edges(n, [(u, w) for u in range(n) for w in range(u + 1, n)], f"K{n}")

    @classmethod
    def cycle(cls, n: int) -> "BaseGraph":
        return cls.from_edges(n, [(u, (u + 1) % n) for u in range(n)], f"C{n}")

    @classmethod
    def path(cls, n: int) -> "BaseGraph":
        return cls.from_edges(n, [(u, u + 1) for u in range(n - 1)], f"P{n}")


def _is_connected(adjacency) -> bool:
    if not adjacency:
        return False
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(adjacency)


def load_base_graph(path: str | Path, c_max: int = DEFAULT_C_MAX) -> BaseGraph:
    """Read a base graph: first line ``n m``, then ``m`` lines ``u v`` (0-based)."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError(f"{path}: header must be 'n m'")
    n, m = int(lines[0][0]), int(lines[0][1])
    if len(lines) - 1 != m:
        raise ValueError(f"{path}: header declares {m} edges, found {len(lines) - 1}")
    if not 2 <= n <= c_max:
        raise ValueError(f"{path}: order {n} outside [2, {c_max}]")
    edges = [(int(a), int(b)) for a, b in lines[1:]]
    return BaseGraph.from_edges(n, edges, name=f"file({path})")


def _atom_graph(atom: Atom, c_max: int, base_dir: Path | None) -> BaseGraph:
    if atom.kind == "K":
        return BaseGraph.complete(int(atom.value))
    if atom.kind == "C":
        return BaseGraph.cycle(int(atom.value))
    if atom.kind == "P":
        return BaseGraph.path(int(atom.value))
    if atom.kind == "file":
        p = Path(str(atom.value))
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return load_base_graph(p, c_max)
    raise ValueError(f"unexpected atom kind {atom.kind!r}")


def _vertex_dtype(n: int):
    return np.int32 if n < 2**31 else np.int64


@dataclass(frozen=True)
class EdgeIndexing:
    """Canonical edge order: sorted by (min endpoint, direction, max endpoint)."""

    src: np.ndarray
    dst: np.ndarray
    direction: np.ndarray
    _key: np.ndarray = field(repr=False)

    @property
    def total(self) -> int:
        return len(self.src)

    def __len__(self) -> int:
        return len(self.src)

    def __getitem__(self, i: int) -> tuple[int, int]:
        return int(self.src[i]), int(self.dst[i])

    def index_of(self, u: int, v: int, G: "ProductGraph") -> int:
        """Canonical id of edge ``uv``; raises ``KeyError`` if it is not an edge."""
        a, b = (u, v) if u < v else (v, u)
        ca, cb = G.coords(a), G.coords(b)
        diff = [j for j in range(G.t) if ca[j] != cb[j]]
        if len(diff) != 1 or cb[diff[0]] not in G.bases[diff[0]].adjacency[ca[diff[0]]]:
            raise KeyError((u, v))
        key = G._edge_key(a, diff[0], cb[diff[0]])
        i = int(np.searchsorted(self._key, key))
        if i >= len(self._key) or self._key[i] != key:
            raise KeyError((u, v))
        return i


@dataclass(frozen=True, eq=False)
class ProductGraph:
    """Immutable Cartesian product of :class:`BaseGraph` factors."""

    bases: tuple[BaseGraph, ...]
    spec: str = ""

    @property
    def t(self) -> int:
        return len(self.bases)

    @cached_property
    def orders(self) -> np.ndarray:
        return np.array([b.vertex_count for b in self.bases], dtype=np.int64)

    @cached_property
    def strides(self) -> np.ndarray:
        return np.concatenate(([1], np.cumprod(self.orders)[:-1])).astype(np.int64)

    @cached_property
    def n(self) -> int:
        return int(np.prod(self.orders))

    @property
    def C(self) -> int:
        """Maximum base order."""
        return int(self.orders.max())

    @cached_property
    def d(self) -> int | None:
        degs = [b.regular_degree for b in self.bases]
        return None if any(x is None for x in degs) else int(sum(degs))

    @property
    def is_regular(self) -> bool:
        return self.d is not None

    @cached_property
    def edge_count(self) -> int:
        return sum(len(b.edges) * (self.n // b.vertex_count) for b in self.bases)

    def __repr__(self) -> str:
        return f"ProductGraph({self.spec or self.t}, n={self.n}, d={self.d})"

    # vertex codec

    def coords(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        out = []
        for o in self.orders:
            v, r = divmod(v, int(o))
            out.append(r)
        return tuple(out)

    def index(self, coords) -> int:
        if len(coords) != self.t:
            raise ValueError(f"expected {self.t} coordinates, got {len(coords)}")
        idx = 0
        for c, o, s in zip(coords, self.orders, self.strides):
            if not 0 <= c < o:
                raise ValueError(f"coordinate {c} outside base range [0, {o})")
            idx += int(c) * int(s)
        return idx

    def coords_array(self, vs) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        return (vs[:, None] // self.strides[None, :]) % self.orders[None, :]

    def degrees(self) -> np.ndarray:
        """Degree of every vertex in the full graph."""
        deg = np.zeros(self.n, dtype=np.int32)
        for j, b in enumerate(self.bases):
            bdeg = np.array([len(a) for a in b.adjacency], dtype=np.int32)
            coord = (np.arange(self.n, dtype=np.int64) // self.strides[j]) % self.orders[j]
            deg += bdeg[coord]
        return deg

    def degree(self, v: int) -> int:
        return sum(len(b.adjacency[c]) for b, c in zip(self.bases, self.coords(v)))

    # adjacency

    def neighbors(self, v: int) -> list[int]:
        if self.n <= ADJACENCY_CACHE_LIMIT:
            indptr, indices = self.adjacency
            if not 0 <= v < self.n:
                raise IndexError(f"vertex {v} out of range [0, {self.n})")
            return indices[indptr[v] : indptr[v + 1]].tolist()
        return self._neighbors_on_the_fly(v)

    def _neighbors_on_the_fly(self, v: int) -> list[int]:
        cs = self.coords(v)
        out = []
        for j, (b, a) in enumerate(zip(self.bases, cs)):
            s = int(self.strides[j])
            out.extend(v + (w - a) * s for w in b.adjacency[a])
        return sorted(out)

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, indices)`` of the full graph, neighbors ascending."""
        e = self.edges
        return _csr(self.n, e.src, e.dst)

    # edges

    def _edge_key(self, src, j, b):
        return (np.int64(src) * self.t + j) * self.C + b

    @cached_property
    def edges(self) -> EdgeIndexing:
        dt = _vertex_dtype(self.n)
        srcs, dsts, dirs, keys = [], [], [], []
        for j, base in enumerate(self.bases):
            s = int(self.strides[j])
            o = int(self.orders[j])
            idx = np.arange(self.n // o, dtype=np.int64)
            stem = idx % s + (idx // s) * s * o
            for a, b in base.edges:
                src = stem + a * s
                srcs.append(src)
                dsts.append(src + (b - a) * s)
                dirs.append(np.full(len(src), j, dtype=np.int16))
                keys.append((src * self.t + j) * self.C + b)
        if not srcs:
            empty = np.zeros(0, dtype=dt)
            return EdgeIndexing(empty, empty, np.zeros(0, np.int16), np.zeros(0, np.int64))
        key = np.concatenate(keys)
        order = np.argsort(key, kind="stable")
        return EdgeIndexing(
            np.concatenate(srcs)[order].astype(dt),
            np.concatenate(dsts)[order].astype(dt),
            np.concatenate(dirs)[order],
            key[order],
        )


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.concatenate((src, dst)).astype(np.int64)
    b = np.concatenate((dst, src)).astype(np.int64)
    order = np.argsort(a * n + b, kind="stable")
    indices = b[order].astype(_vertex_dtype(n))
    counts = np.bincount(a, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


def build_product(
    spec: GraphSpec | str,
    *,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    c_max: int = DEFAULT_C_MAX,
    base_dir: str | Path | None = None,
) -> ProductGraph:
    """Build the product graph described by ``spec``.

    Refuses (``GuardError``) when the vertex count would exceed ``max_vertices``.
    """
    if isinstance(spec, str):
        spec = parse_graph_expr(spec, c_max=c_max)
    bdir = Path(base_dir) if base_dir is not None else None
    cache: dict[Atom, BaseGraph] = {}
    bases = []
    n = 1
    for term in spec.terms:
        atom = term.atom
        if atom not in cache:
            cache[atom] = _atom_graph(Atom("K", 2) if atom.kind == "Q" else atom, c_max, bdir)
        copies = term.power * (int(atom.value) if atom.kind == "Q" else 1)
        vc = cache[atom].vertex_count
        if copies * math.log(vc) > math.log(max_vertices) - math.log(n) + 1e-9:
            raise GuardError(f"graph {spec} exceeds the vertex cap {max_vertices}")
        n *= vc**copies
        bases.extend([cache[atom]] * copies)
    return ProductGraph(tuple(bases), str(spec))


def graph(text: str, **kwargs) -> ProductGraph:
    """Shorthand: parse and build in one call."""
    return build_product(parse_graph_expr(text, c_max=kwargs.get("c_max", DEFAULT_C_MAX)), **kwargs)


def neighbors(G: ProductGraph, v: int) -> list[int]:
    return G.neighbors(v)


def vertex_codec(G: ProductGraph, x):
    """Index -> coordinates, or coordinates -> index, depending on the input."""
    if isinstance(x, (int, np.integer)):
        return G.coords(int(x))
    return G.index(tuple(x))


def enumerate_edges(G: ProductGraph) -> EdgeIndexing:
    return G.edges
