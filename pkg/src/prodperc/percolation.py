"""Seed-reproducible bond percolation on product graphs.

Edge ``e`` is retained iff ``U(seed, e) < p`` where ``U`` is a stateless
counter-based uniform (splitmix64 finalizer over the pair ``(seed, e)``), so a
sample does not depend on chunking, thread count or evaluation order.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .graph import ProductGraph, _csr

__all__ = [
    "EdgeSample",
    "SprinklePair",
    "edge_uniforms",
    "sample_percolation",
    "two_round_split",
    "merge_samples",
    "high_degree_census",
    "sample_degrees",
    "save_sample",
    "load_sample",
    "sample_to_hex",
    "sample_from_hex",
    "eps_to_p",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = 0x5DEECE66D2B7E151
_CHUNK = 1 << 22
_MAGIC = b"PPES"


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def edge_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniform [0, 1) variates for canonical edge ids ``start..stop-1``."""
    key = _mix(np.array([(seed ^ _SEED_SALT) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    ids = np.arange(start, stop, dtype=np.uint64) + np.uint64(1)
    z = _mix(key + ids * _GOLDEN)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)


def eps_to_p(eps: float, d: int) -> float:
    return (1.0 + eps) / d


@dataclass(frozen=True, eq=False)
class EdgeSample:
    """Retained-edge mask over the canonical edge ids of ``graph``.

    ``seed`` is ``None`` for samples obtained by merging.
    """

    graph: ProductGraph
    p: float
    seed: int | None
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.mask) != self.graph.edge_count:
            raise ValueError("mask length differs from the graph's edge count")

    @cached_property
    def retained_count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @cached_property
    def retained(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @cached_property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """``(src, dst)`` of retained edges in canonical order."""
        e = self.graph.edges
        return e.src[self.mask], e.dst[self.mask]

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of the retained subgraph ``G_p``."""
        src, dst = self.endpoints
        return _csr(self.graph.n, src, dst)

    @cached_property
    def degrees(self) -> np.ndarray:
        src, dst = self.endpoints
        n = self.graph.n
        return (np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)).astype(np.int32)

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.adjacency
        return indices[indptr[v] : indptr[v + 1]]

    def __repr__(self) -> str:
        return f"EdgeSample({self.graph.spec}, p={self.p:.6g}, seed={self.seed}, retained={self.retained_count})"


@dataclass(frozen=True)
class SprinklePair:
    p: float
    p2: float
    p1: float


def sample_percolation(G: ProductGraph, p: float, seed: int, threads: int = 1) -> EdgeSample:
    """Keep every edge of ``G`` independently with probability ``p``."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    m = G.edge_count
    if p == 0.0:
        return EdgeSample(G, p, seed, np.zeros(m, dtype=bool))
    if p == 1.0:
        return EdgeSample(G, p, seed, np.ones(m, dtype=bool))
    mask = np.empty(m, dtype=bool)

    def fill(start):
        stop = min(start + _CHUNK, m)
        mask[start:stop] = edge_uniforms(seed, start, stop) < p

    starts = range(0, m, _CHUNK)
    if threads > 1 and m > _CHUNK:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(fill, starts))
    else:
        for s in starts:
            fill(s)
    return EdgeSample(G, float(p), seed, mask)


def two_round_split(p: float, p2: float) -> SprinklePair:
    """Base probability ``p1`` with ``(1 - p1)(1 - p2) = 1 - p``."""
    if not 0.0 <= p2 <= p:
        raise ValueError(f"need 0 <= p2 <= p, got p={p}, p2={p2}")
    if p >= 1.0:
        raise ValueError("p must be < 1 for a two-round split")
    p1 = (p - p2) / (1.0 - p2)
    return SprinklePair(p=p, p2=p2, p1=max(p1, 0.0))


def merge_samples(a: EdgeSample, b: EdgeSample) -> EdgeSample:
    """Union of two samples on the same graph.

    Independent inputs at ``pa`` and ``pb`` give a sample distributed at
    ``1 - (1 - pa)(1 - pb)``; merging a sample with itself returns it unchanged.
    """
    if a.graph is not b.graph:
        raise ValueError("cannot merge samples over different graphs")
    if a is b or (a.seed is not None and a.seed == b.seed and a.p == b.p) or (b.p == 0 and b.retained_count == 0):
        return a
    if a.p == 0 and a.retained_count == 0:
        return b
    return EdgeSample(a.graph, a.p + b.p - a.p * b.p, None, a.mask | b.mask)


def sample_degrees(s: EdgeSample) -> np.ndarray:
    return s.degrees


def high_degree_census(G: ProductGraph, s: EdgeSample, threshold: float | None = None) -> int:
    """Number of vertices whose retained degree is at least ``threshold`` (default ``ln d``)."""
    if not G.is_regular:
        raise ValueError("high-degree census needs a regular product graph")
    if threshold is None:
        threshold = math.log(G.d)
    return int(np.count_nonzero(s.degrees >= threshold))


# export / import


def save_sample(path: str | Path, s: EdgeSample) -> None:
    spec = s.graph.spec.encode("utf-8")
    seed = -1 if s.seed is None else int(s.seed)
    header = _MAGIC + struct.pack("<HI", 1, len(spec)) + spec
    header += struct.pack("<dqQ", s.p, seed, s.graph.edge_count)
    bits = np.packbits(s.mask, bitorder="little")
    Path(path).write_bytes(header + bits.tobytes())


def load_sample(path: str | Path, G: ProductGraph) -> EdgeSample:
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError(f"{path}: not an edge-sample file")
    version, slen = struct.unpack_from("<HI", raw, 4)
    if version != 1:
        raise ValueError(f"{path}: unsupported version {version}")
    off = 10
    spec = raw[off : off + slen].decode("utf-8")
    off += slen
    p, seed, m = struct.unpack_from("<dqQ", raw, off)
    off += 24
    _check_header(spec, m, G)
    mask = np.unpackbits(np.frombuffer(raw[off:], dtype=np.uint8), bitorder="little", count=m)
    return EdgeSample(G, p, None if seed < 0 else seed, mask.astype(bool))


def sample_to_hex(s: EdgeSample) -> str:
    seed = -1 if s.seed is None else s.seed
    bits = np.packbits(s.mask, bitorder="little").tobytes().hex()
    return (
        "prodperc-edge-sample 1\n"
        f"graph {s.graph.spec}\np {s.p!r}\nseed {seed}\nedge_count {s.graph.edge_count}\nmask {bits}\n"
    )


def sample_from_hex(text: str, G: ProductGraph) -> EdgeSample:
    lines = text.strip().splitlines()
    if not lines or lines[0] != "prodperc-edge-sample 1":
        raise ValueError("not a hex edge-sample")
    fields = dict(ln.split(" ", 1) if " " in ln else (ln, "") for ln in lines[1:])
    m = int(fields["edge_count"])
    _check_header(fields["graph"], m, G)
    bits = np.frombuffer(bytes.fromhex(fields["mask"]), dtype=np.uint8)
    mask = np.unpackbits(bits, bitorder="little", count=m).astype(bool)
    seed = int(fields["seed"])
    return EdgeSample(G, float(fields["p"]), None if seed < 0 else seed, mask)


def _check_header(spec: str, m: int, G: ProductGraph):
    if m != G.edge_count:
        raise ValueError(f"sample has {m} edges but graph {G.spec} has {G.edge_count}")
    if spec and G.spec and spec != G.spec:
        raise ValueError(f"sample was drawn on {spec!r}, not {G.spec!r}")
