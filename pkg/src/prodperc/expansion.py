"""Tree decomposition, matchings, short paths and expansion audits on the giant component.

Three exact combinatorial tools (tree decomposition, bipartite matching,
disjoint short paths) plus two statistical instruments: ``audit_expansion``
compares boundaries of sampled subsets of the giant against the expansion
thresholds, and ``extract_expander`` peels off sets of poor vertex expansion
until no violator is found within a probe budget.

The connected-set sampler grows sets by random frontier expansion.  It is
seed-deterministic but *not* uniform over connected sets, so the audits are
falsification probes rather than certificates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .components import ComponentLabeling, label_components
from .graph import ProductGraph
from .isoperimetry import VertexSubset
from .percolation import EdgeSample
from .view import ComponentView, approx_fiedler, component_view

__all__ = [
    "TreeDecomposition",
    "ExpansionReport",
    "ExpansionRow",
    "ExtractionResult",
    "tree_decompose",
    "max_bipartite_matching",
    "sample_connected_subset",
    "grow_connected",
    "count_disjoint_short_paths",
    "expansion_threshold",
    "audit_expansion",
    "extract_expander",
    "EXPANSION_COLUMNS",
]

EXPANSION_COLUMNS = ["k", "connected", "boundary", "neighborhood", "threshold", "pass"]


# tree decomposition


@dataclass(frozen=True)
class TreeDecomposition:
    parts: list[list[int]]
    ell: int

    def __len__(self):
        return len(self.parts)


def _check_tree(adj) -> int:
    n = len(adj)
    half_edges = 0
    for v, nb in enumerate(adj):
        for w in nb:
            if not 0 <= w < n or w == v:
                raise ValueError(f"bad neighbour {w} of vertex {v}")
            half_edges += 1
    if half_edges != 2 * (n - 1):
        raise ValueError(f"not a tree: {half_edges // 2} edges on {n} vertices")
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    if count != n:
        raise ValueError("not a tree: disconnected")
    return n


def tree_decompose(adj, ell: int) -> TreeDecomposition:
    """Split a tree into connected parts of size in ``[ell, 3 ell]``, each sharing at most one vertex.

    ``adj`` is a list of neighbour lists over vertices ``0..n-1``; the tree is
    rooted at vertex 0.  Vertices are visited deepest first while tracking the
    residual subtree size ``r(v)``; children still attached always have
    ``r < ell``.  Once ``r(v) >= ell`` at some v:

    * ``r(v) <= 3 ell``: the residual subtree of v becomes one part and is cut off,
      unless fewer than ``ell`` vertices would remain, in which case v plus
      children subtrees totalling ``[ell - 1, 2 ell - 2]`` form one part and
      everything else (including v) the other;
    * ``r(v) > 3 ell``: children subtrees are grouped greedily (ascending id)
      into runs totalling ``[ell - 1, 2 ell - 2]`` (a short tail joins the last
      run) and each run plus v is a part; a leftover of fewer than ``ell``
      vertices above v is added to the first run.

    Every part therefore meets the others in at most its own centre vertex.
    Once at most ``3 ell`` vertices remain they form the last part.
    """
    adj = [list(nb) for nb in adj]
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if len(adj) == 0:
        raise ValueError("empty tree")
    n = _check_tree(adj)
    if n < ell:
        raise ValueError(f"tree has {n} vertices, fewer than ell={ell}")
    if n <= 3 * ell:
        return TreeDecomposition([list(range(n))], ell)

    parent = [-1] * n
    order = [0]
    parent[0] = 0
    for u in order:
        for w in adj[u]:
            if parent[w] < 0:
                parent[w] = u
                order.append(w)
    parent[0] = -1
    live = [sorted(w for w in adj[u] if w != parent[u]) for u in range(n)]

    FINAL = -1
    resid = [0] * n
    tag = [None] * n  # part id owning the (residual) subtree below this vertex
    extra: list[list[int]] = []  # per part: centre vertices added explicitly
    final_alias = None
    remaining = n

    def new_part(centre=None):
        extra.append([] if centre is None else [centre])
        return len(extra) - 1

    def groups(v):
        runs, cur, total = [], [], 0
        for c in live[v]:
            cur.append(c)
            total += resid[c]
            if total >= ell - 1:
                runs.append(cur)
                cur, total = [], 0
        if cur:
            if runs:
                runs[-1].extend(cur)
            else:
                runs.append(cur)
        return runs

    # BFS order reversed visits vertices in non-increasing depth
    for v in reversed(order):
        if remaining <= 3 * ell:
            break
        resid[v] = 1 + sum(resid[c] for c in live[v])
        if resid[v] < ell:
            continue
        rest = remaining - resid[v]
        if resid[v] <= 3 * ell:
            if rest >= ell:
                tag[v] = new_part()
                remaining = rest
                live[parent[v]].remove(v)
                continue
            # two parts sharing v; the second is everything else
            taken, total = [], 0
            for c in live[v]:
                taken.append(c)
                total += resid[c]
                if total >= ell - 1:
                    break
            pid = new_part(v)
            for c in taken:
                tag[c] = pid
            remaining = 0
            break
        runs = groups(v)
        pids = [new_part() for _ in runs]
        for pid, run in zip(pids, runs):
            for c in run:
                tag[c] = pid
            if pid != pids[0]:
                extra[pid].append(v)
        tag[v] = pids[0]
        if 0 < rest < ell:
            final_alias = pids[0]
            remaining = 0
            break
        remaining = rest
        if parent[v] >= 0:
            live[parent[v]].remove(v)

    part_of = [FINAL] * n
    for u in order:
        if tag[u] is not None:
            part_of[u] = tag[u]
        elif parent[u] >= 0:
            part_of[u] = part_of[parent[u]]
    parts = [list(e) for e in extra]
    parts.append([])
    for u in range(n):
        pid = part_of[u]
        if pid == FINAL:
            pid = final_alias if final_alias is not None else len(extra)
        parts[pid].append(u)
    return TreeDecomposition([sorted(set(p)) for p in parts if p], ell)


# matching


def max_bipartite_matching(left, right, edges) -> int:
    """Maximum matching size by Hopcroft-Karp."""
    left = list(dict.fromkeys(left))
    right_set = set(right)
    lpos = {x: i for i, x in enumerate(left)}
    if lpos.keys() & right_set:
        raise ValueError("left and right sides overlap")
    rpos = {x: i for i, x in enumerate(dict.fromkeys(right))}
    nl, nr = len(lpos), len(rpos)
    adj = [[] for _ in range(nl)]
    for a, b in edges:
        if a in lpos and b in rpos:
            adj[lpos[a]].append(rpos[b])
        elif b in lpos and a in rpos:
            adj[lpos[b]].append(rpos[a])
        else:
            raise ValueError(f"edge ({a!r}, {b!r}) does not join the two declared sides")

    INF = nl + nr + 1
    match_l = [-1] * nl
    match_r = [-1] * nr
    size = 0
    while True:
        # BFS layers from free left vertices
        dist = [INF] * nl
        q = deque()
        for u in range(nl):
            if match_l[u] < 0:
                dist[u] = 0
                q.append(u)
        found = False
        while q:
            u = q.popleft()
            for w in adj[u]:
                m = match_r[w]
                if m < 0:
                    found = True
                elif dist[m] == INF:
                    dist[m] = dist[u] + 1
                    q.append(m)
        if not found:
            return size
        # iterative DFS along layers
        ptr = [0] * nl
        for root in range(nl):
            if match_l[root] >= 0:
                continue
            stack = [root]
            path = []
            while stack:
                u = stack[-1]
                advanced = False
                while ptr[u] < len(adj[u]):
                    w = adj[u][ptr[u]]
                    ptr[u] += 1
                    m = match_r[w]
                    if m < 0:
                        path.append(w)
                        # augment along the stack
                        for x, y in zip(stack, path):
                            match_l[x] = y
                            match_r[y] = x
                        size += 1
                        stack = []
                        advanced = True
                        break
                    if dist[m] == dist[u] + 1:
                        path.append(w)
                        stack.append(m)
                        advanced = True
                        break
                if not stack:
                    break
                if not advanced:
                    dist[u] = INF
                    stack.pop()
                    if path:
                        path.pop()


# connected sets


def grow_connected(indptr, indices, start: int, size: int, rng) -> np.ndarray:
    """Random frontier growth from ``start``; returns vertices in insertion order.

    Each step adds a uniformly chosen frontier vertex.  Stops early if the
    component of ``start`` is exhausted.
    """
    inset = {start}
    out = [start]
    frontier = []
    onfront = set()
    for w in indices[indptr[start] : indptr[start + 1]].tolist():
        onfront.add(w)
        frontier.append(w)
    while len(out) < size and frontier:
        i = int(rng.integers(len(frontier)))
        v = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        onfront.discard(v)
        inset.add(v)
        out.append(v)
        for w in indices[indptr[v] : indptr[v + 1]].tolist():
            if w not in inset and w not in onfront:
                onfront.add(w)
                frontier.append(w)
    return np.asarray(out, dtype=np.int64)


def sample_connected_subset(
    G: ProductGraph, s: EdgeSample, size: int, seed, labeling: ComponentLabeling | None = None
) -> VertexSubset:
    """Connected (in ``G_p``) set of exactly ``size`` giant vertices, grown from a random giant vertex."""
    lab = labeling if labeling is not None else label_components(G, s)
    if size < 1:
        raise ValueError("size must be >= 1")
    if lab.giant_size < size:
        raise ValueError(f"largest component has {lab.giant_size} vertices, fewer than {size}")
    rng = np.random.default_rng(seed)
    giant = lab.giant_vertices()
    if size == len(giant):
        return VertexSubset.of(G, giant)
    indptr, indices = s.adjacency
    start = int(giant[rng.integers(len(giant))])
    return VertexSubset.of(G, grow_connected(indptr, indices, start, size, rng))


def _boundary_and_neighborhood(indptr, indices, inset: np.ndarray, verts: np.ndarray) -> tuple[int, int]:
    starts = indptr[verts]
    counts = indptr[verts + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return 0, 0
    offs = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    nbrs = indices[offs + np.arange(total)]
    out = nbrs[~inset[nbrs]]
    return len(out), len(np.unique(out))


# disjoint short paths


def count_disjoint_short_paths(G: ProductGraph, s: EdgeSample, A: VertexSubset, B: VertexSubset, maxlen: int) -> int:
    """Maximum number of vertex-disjoint A-B paths of length <= maxlen in ``G_p``.

    Paths are restricted to breadth layers from A: each step goes from layer
    i to layer i+1, and B vertices only end paths.  This is a unit vertex
    capacity max-flow on the layered graph, and a lower bound on the count of
    unrestricted short disjoint paths.
    """
    if np.any(A.members & B.members):
        raise ValueError("A and B overlap")
    if not 1 <= maxlen <= 6:
        raise ValueError("maxlen must be in [1, 6]")
    indptr, indices = s.adjacency
    return _layered_disjoint_paths(indptr, indices, A.vertices(), B.members, maxlen)


def _layered_disjoint_paths(indptr, indices, sources: np.ndarray, in_b: np.ndarray, maxlen: int) -> int:
    if len(sources) == 0 or not in_b.any():
        return 0
    # breadth layers from A; B vertices are sinks, so the search stops there
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    frontier = [int(a) for a in sources]
    for a in frontier:
        dist[a] = 0
    layer = 0
    while frontier and layer < maxlen:
        nxt = []
        for u in frontier:
            if in_b[u]:
                continue
            for w in indices[indptr[u] : indptr[u + 1]].tolist():
                if dist[w] < 0:
                    dist[w] = layer + 1
                    nxt.append(w)
        frontier = nxt
        layer += 1
    # residual graph on split vertices: node 2x = in, 2x+1 = out
    used = np.flatnonzero(dist >= 0)
    S, T = -1, -2
    cap = {}
    adj: dict[int, list[int]] = {S: [], T: []}

    def add(a, b):
        cap[(a, b)] = cap.get((a, b), 0) + 1
        cap.setdefault((b, a), 0)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    for x in used.tolist():
        add(2 * x, 2 * x + 1)
        if dist[x] == 0:
            add(S, 2 * x)
        if in_b[x]:
            add(2 * x + 1, T)
            continue
        for w in indices[indptr[x] : indptr[x + 1]].tolist():
            if dist[w] == dist[x] + 1:
                add(2 * x + 1, 2 * w)
    flow = 0
    while True:
        prev = {S: None}
        q = deque([S])
        while q and T not in prev:
            u = q.popleft()
            for w in adj[u]:
                if w not in prev and cap[(u, w)] > 0:
                    prev[w] = u
                    q.append(w)
        if T not in prev:
            return flow
        w = T
        while prev[w] is not None:
            u = prev[w]
            cap[(u, w)] -= 1
            cap[(w, u)] += 1
            w = u
        flow += 1


# audits


def expansion_threshold(
    mode: str, k: int, *, c: float, eps: float, d: int, n: int, giant_size: int, small_lower: float = 1.0
) -> tuple[str, str, float]:
    """``(regime, quantity, threshold)`` for a k-subset of the giant.

    ``quantity`` is ``"neighborhood"``, ``"boundary"``, ``"both"`` or ``""``
    when the size is outside every regime.  Connected regimes: small sets
    (``small_lower <= k <= n^(eps^5)``) need ``|N(S)| >= c k``, larger ones up to
    ``3 eps n / 2`` need ``|boundary(S)| >= c k ln(n/k) / (d ln d)``.  Arbitrary
    sets need ``|boundary(S)| >= c k / (d ln d)``, and from ``k >= eps^2 n`` on
    also ``|N(S)|`` above the same value.
    """
    dlnd = d * math.log(d)
    upper = 1.5 * eps * n
    if k < 1 or k > upper or k >= giant_size:
        return "out_of_range", "", float("nan")
    if mode == "connected":
        if k < small_lower:
            return "out_of_range", "", float("nan")
        if k <= n ** (eps**5):
            return "connected_small", "neighborhood", c * k
        return "connected_medium", "boundary", c * k * math.log(n / k) / dlnd
    if mode == "arbitrary":
        if math.floor(eps**2 * n) <= k:
            return "arbitrary_large", "both", c * k / dlnd
        return "arbitrary", "boundary", c * k / dlnd
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ExpansionRow:
    k: int
    connected: bool
    boundary: int
    neighborhood: int
    regime: str
    threshold: float
    passed: bool | None  # None when out of range


@dataclass
class ExpansionReport:
    mode: str
    c: float
    eps: float
    rows: list[ExpansionRow] = field(default_factory=list)

    def in_range(self) -> list[ExpansionRow]:
        return [r for r in self.rows if r.passed is not None]

    @property
    def pass_rate(self) -> float:
        rs = self.in_range()
        return sum(r.passed for r in rs) / len(rs) if rs else float("nan")

    def pass_rates(self) -> dict[int, float]:
        out: dict[int, list[bool]] = {}
        for r in self.in_range():
            out.setdefault(r.k, []).append(r.passed)
        return {k: sum(v) / len(v) for k, v in sorted(out.items())}

    def out_of_range_sizes(self) -> list[int]:
        return sorted({r.k for r in self.rows if r.passed is None})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(EXPANSION_COLUMNS)
        for r in self.rows:
            w.writerow(
                [
                    r.k,
                    int(r.connected),
                    r.boundary,
                    r.neighborhood,
                    "" if math.isnan(r.threshold) else repr(r.threshold),
                    "" if r.passed is None else int(r.passed),
                ]
            )
        return buf.getvalue()


def audit_expansion(
    G: ProductGraph,
    s: EdgeSample,
    *,
    eps: float,
    c: float,
    sizes,
    draws: int,
    mode: str = "connected",
    seed: int = 0,
    small_lower: float = 1.0,
    labeling: ComponentLabeling | None = None,
) -> ExpansionReport:
    """Sample ``draws`` subsets of the giant per size and test them against the thresholds."""
    if not G.is_regular:
        raise ValueError("expansion thresholds need a regular product graph")
    if mode not in ("connected", "arbitrary"):
        raise ValueError(f"unknown mode {mode!r}")
    lab = labeling if labeling is not None else label_components(G, s)
    giant = lab.giant_vertices()
    indptr, indices = s.adjacency
    inset = np.zeros(G.n, dtype=bool)
    rng = np.random.default_rng(seed)
    report = ExpansionReport(mode, c, eps)
    for k in sizes:
        k = int(k)
        regime, qty, thr = expansion_threshold(
            mode, k, c=c, eps=eps, d=G.d, n=G.n, giant_size=len(giant), small_lower=small_lower
        )
        reps = 1 if k >= len(giant) else draws
        for _ in range(reps):
            if k >= len(giant):
                verts = giant
            elif mode == "connected":
                start = int(giant[rng.integers(len(giant))])
                verts = grow_connected(indptr, indices, start, k, rng)
            else:
                verts = rng.choice(giant, size=k, replace=False)
            inset[verts] = True
            bnd, nbh = _boundary_and_neighborhood(indptr, indices, inset, verts)
            inset[verts] = False
            if qty == "":
                ok = None
            elif qty == "neighborhood":
                ok = nbh >= thr
            elif qty == "boundary":
                ok = bnd >= thr
            else:
                ok = bnd >= thr and nbh >= thr
            report.rows.append(ExpansionRow(k, mode == "connected", bnd, nbh, regime, thr, ok))
    return report


# expander extraction


@dataclass
class ExtractionResult:
    vertices: np.ndarray  # global ids of H, sorted
    giant_size: int
    log: list[dict] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def log_jsonl(self) -> str:
        return "".join(json.dumps(entry, sort_keys=True) + "\n" for entry in self.log)


class _Sweeper:
    """Incremental ``|N_H(prefix)|`` along a vertex order of a view."""

    def __init__(self, view: ComponentView):
        self.view = view

    def scan(self, order, limit: int, thr_per_vertex: float):
        """Best violating prefix of ``order`` with size <= limit, as (ratio, size) or None."""
        indptr, indices = self.view.indptr, self.view.indices
        n = self.view.size
        inpre = np.zeros(n, dtype=bool)
        cnt = np.zeros(n, dtype=np.int64)
        nbh = 0
        best = None
        for i, v in enumerate(order[:limit].tolist()):
            if cnt[v] > 0:
                nbh -= 1
            inpre[v] = True
            for w in indices[indptr[v] : indptr[v + 1]].tolist():
                if not inpre[w]:
                    if cnt[w] == 0:
                        nbh += 1
                    cnt[w] += 1
            size = i + 1
            if nbh < thr_per_vertex * size:
                ratio = nbh / size
                if best is None or ratio < best[0] or (ratio == best[0] and size < best[1]):
                    best = (ratio, size)
        return best


def _local_neighborhood(view: ComponentView, local: np.ndarray) -> int:
    inset = np.zeros(view.size, dtype=bool)
    inset[local] = True
    return _boundary_and_neighborhood(view.indptr, view.indices, inset, local)[1]


def extract_expander(
    G: ProductGraph,
    s: EdgeSample,
    c_target: float,
    eps: float,
    *,
    seed: int = 0,
    probes: int = 20,
    sweeps: int = 2,
    power_iters: int = 200,
    max_iterations: int = 10_000,
    labeling: ComponentLabeling | None = None,
) -> ExtractionResult:
    """Peel sets B with ``|N_H(B)| < c_target |B| / (d ln d)`` off the giant.

    Starts from ``H = L1``.  Each round looks for violators among
    (1) all but the largest component of H, (2) prefixes and suffixes of
    approximate second-eigenvector orderings, (3) ``probes`` randomly grown
    connected sets, each checked at every intermediate size.  Candidates hold
    at most half of H.  The most violating candidate (smallest ``|N|/|B|``) is
    re-verified from scratch and removed.  The loop ends when a round finds
    nothing.
    """
    if c_target < 0:
        raise ValueError("c_target must be >= 0")
    if not G.is_regular:
        raise ValueError("expander extraction needs a regular product graph")
    lab = labeling if labeling is not None else label_components(G, s)
    H = lab.giant_vertices()
    result = ExtractionResult(H, len(H))
    if c_target == 0:
        return result
    floor = eps * G.n / 2
    per_vertex = c_target / (G.d * math.log(G.d))
    rng = np.random.default_rng(seed)
    for it in range(max_iterations):
        view = component_view(s, H)
        half = view.size // 2
        cand = None  # (ratio, size, local vertices)

        labels, k = _kernels.union_find_labels(view.size, *[a.astype(np.int64) for a in view.edge_list])
        if k > 1:
            sizes = np.bincount(labels)
            big = int(np.argmax(sizes))
            local = np.flatnonzero(labels != big)
            if len(local) <= half:
                cand = (0.0, len(local), local)
        if cand is None:
            sweeper = _Sweeper(view)
            for _ in range(sweeps):
                x = approx_fiedler(view, power_iters, rng)
                order = np.argsort(x, kind="stable")
                for o in (order, order[::-1]):
                    hit = sweeper.scan(o, half, per_vertex)
                    if hit is not None and (cand is None or hit[0] < cand[0]):
                        cand = (hit[0], hit[1], o[: hit[1]])
            for _ in range(probes):
                if half < 1:
                    break
                start = int(rng.integers(view.size))
                target = int(rng.integers(1, half + 1))
                grown = grow_connected(view.indptr, view.indices, start, target, rng)
                hit = sweeper.scan(grown, half, per_vertex)
                if hit is not None and (cand is None or hit[0] < cand[0]):
                    cand = (hit[0], hit[1], grown[: hit[1]])
        if cand is None:
            break
        local = np.asarray(cand[2], dtype=np.int64)
        nbh = _local_neighborhood(view, local)
        threshold = per_vertex * len(local)
        if not nbh < threshold:
            raise AssertionError("candidate violator failed re-verification")
        if view.size - len(local) < floor:
            raise ValueError("target expansion unachievable at this scale")
        result.log.append(
            {
                "iteration": it,
                "removed_size": int(len(local)),
                "neighborhood": int(nbh),
                "threshold": threshold,
                "violation": nbh / threshold,
            }
        )
        keep = np.ones(view.size, dtype=bool)
        keep[local] = False
        H = view.vertices[keep]
    result.vertices = H
    return result
