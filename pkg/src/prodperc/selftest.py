"""Quick oracle suite.  Output is a deterministic CSV: no timings, fixed seeds."""

from __future__ import annotations

import hashlib
import math
from itertools import combinations

import networkx as nx
import numpy as np

from .components import label_components, survival_fraction
from .expansion import max_bipartite_matching, tree_decompose
from .graph import graph
from .isoperimetry import (
    check_entropy_floor,
    check_weighted_log_inequality,
    count_trees,
    exact_iso_profile,
    iso_bound_connected,
    iso_bound_regular,
    iso_profile_by_combinations,
)
from .percolation import sample_percolation
from .view import ComponentView
from .walk import mixing_time_exact

COLUMNS = ["check", "value", "expected", "ok"]


def _harper():
    out = []
    for d in (3, 4):
        prof = exact_iso_profile(graph(f"Q{d}"))
        got = [int(prof.min_boundary[2**j]) for j in range(d + 1)]
        want = [(d - j) * 2**j for j in range(d + 1)]
        out.append((f"harper_Q{d}", got, want, got == want))
    return out


def _dominance():
    out = []
    for expr in ("Q4", "K3^2", "K2xK3", "K2^2xK3", "C5xK2"):
        G = graph(expr)
        prof = exact_iso_profile(G)
        ok = True
        for k in range(1, G.n + 1):
            ik = prof.i_k(k)
            if iso_bound_connected(G, k) > ik + 1e-9:
                ok = False
            if G.is_regular and iso_bound_regular(G, k) > ik + 1e-9:
                ok = False
        out.append((f"bounds_{expr}", int(ok), 1, ok))
    return out


def _combinations_oracle():
    G = graph("K3^2")
    got = [int(x) for x in exact_iso_profile(G).min_boundary[:5]]
    want = iso_profile_by_combinations(G, 4)
    return [("profile_K3^2_vs_combinations", got, want, got == want)]


def _entropy(rng):
    bad_floor = bad_log = 0
    for _ in range(2000):
        C = int(rng.integers(2, 17))
        p = rng.dirichlet(np.full(C, rng.uniform(0.1, 3)))
        p = p / p.sum()
        if not check_entropy_floor(np.sort(p).tolist())[2]:
            bad_floor += 1
        if not check_weighted_log_inequality(rng.uniform(0, 100, size=C) * (rng.random(C) < 0.8)):
            bad_log += 1
    return [("entropy_floor_failures", bad_floor, 0, bad_floor == 0), ("weighted_log_failures", bad_log, 0, bad_log == 0)]


def _trees():
    out = []
    for expr in ("Q3", "K3"):
        G = graph(expr)
        e = math.e
        ok = all(count_trees(G, k) <= G.n * (e * G.d) ** (k - 1) for k in range(1, 6))
        out.append((f"tree_count_bound_{expr}", int(ok), 1, ok))
    return out


def _decomposition(rng):
    bad = 0
    for _ in range(50):
        n = int(rng.integers(10, 400))
        g = nx.random_labeled_tree(n, seed=int(rng.integers(2**31)))
        adj = [sorted(g.neighbors(v)) for v in range(n)]
        for ell in (2, 5):
            parts = tree_decompose(adj, ell).parts
            covered = set().union(*map(set, parts))
            sizes_ok = all(ell <= len(p) <= 3 * ell for p in parts)
            conn = all(nx.is_connected(g.subgraph(p)) for p in parts)
            overlap = all(
                len(set(p) & set().union(*(set(q) for j, q in enumerate(parts) if j != i))) <= 1
                for i, p in enumerate(parts)
            )
            if not (covered == set(range(n)) and sizes_ok and conn and overlap):
                bad += 1
    return [("tree_decomposition_failures", bad, 0, bad == 0)]


def _matching(rng):
    bad = 0
    for _ in range(100):
        a, b = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        L = [("l", i) for i in range(a)]
        R = [("r", j) for j in range(b)]
        E = [(x, y) for x in L for y in R if rng.random() < 0.4]
        best = 0
        for r in range(min(a, b, len(E)), 0, -1):
            if any(len({x for x, _ in M}) == r and len({y for _, y in M}) == r for M in combinations(E, r)):
                best = r
                break
        if max_bipartite_matching(L, R, E) != best:
            bad += 1
    return [("matching_failures", bad, 0, bad == 0)]


def _labeling(rng):
    bad = 0
    for _ in range(50):
        G = graph(["Q5", "K3^3", "C5xC4", "P4xK3"][int(rng.integers(4))])
        s = sample_percolation(G, float(rng.uniform(0.1, 0.9)), int(rng.integers(2**31)))
        lab = label_components(G, s)
        g = nx.Graph()
        g.add_nodes_from(range(G.n))
        g.add_edges_from(zip(*s.endpoints))
        want = sorted(sorted(c) for c in nx.connected_components(g))
        got = sorted(sorted(lab.members(c).tolist()) for c in range(lab.count))
        bad += got != want
    return [("labeling_failures", bad, 0, bad == 0)]


def _misc():
    y1 = survival_fraction(1.0)
    k2 = mixing_time_exact(ComponentView.from_edges(2, [(0, 1)]))
    s = sample_percolation(graph("Q10"), 0.15, 1)
    digest = hashlib.sha256(np.packbits(s.mask).tobytes()).hexdigest()[:16]
    return [
        ("survival_fraction_eps1", round(y1, 10), 0.7968121300, abs(y1 - 0.7968121300200199) < 1e-12),
        ("mixing_time_K2", k2, 1, k2 == 1),
        ("sample_digest_Q10_p0.15_seed1", digest, digest, True),
    ]


def run_selftest() -> list[tuple]:
    rng = np.random.default_rng(20240601)
    rows = []
    rows += _harper()
    rows += _dominance()
    rows += _combinations_oracle()
    rows += _entropy(rng)
    rows += _trees()
    rows += _decomposition(rng)
    rows += _matching(rng)
    rows += _labeling(rng)
    rows += _misc()
    return rows


def selftest_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for name, value, expected, ok in rows:
        fmt = lambda x: " ".join(map(str, x)) if isinstance(x, list) else str(x)  # noqa: E731
        w.writerow([name, fmt(value), fmt(expected), int(bool(ok))])
    return buf.getvalue()
