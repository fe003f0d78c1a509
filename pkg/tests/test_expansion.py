import json
import math
from pathlib import Path

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodperc.components import label_components
from prodperc.expansion import (
    EXPANSION_COLUMNS,
    audit_expansion,
    count_disjoint_short_paths,
    expansion_threshold,
    extract_expander,
    max_bipartite_matching,
    sample_connected_subset,
    tree_decompose,
)
from prodperc.graph import graph
from prodperc.isoperimetry import VertexSubset
from prodperc.percolation import EdgeSample, eps_to_p, sample_percolation

from .conftest import sample_to_networkx
from .oracles import brute_matching, layered_paths_bruteforce, random_tree, tree_decomposition_violations

GOLDEN = Path(__file__).parent / "golden"


def path_adj(n):
    return [[w for w in (v - 1, v + 1) if 0 <= w < n] for v in range(n)]


def test_tree_path_example():
    adj = path_adj(10)
    dec = tree_decompose(adj, 3)
    assert tree_decomposition_violations(adj, dec.parts, 3) == []
    assert all(3 <= len(p) <= 9 for p in dec.parts)
    for a in dec.parts:
        for b in dec.parts:
            if a is not b:
                assert len(set(a) & set(b)) <= 1


def test_tree_trivial_and_star():
    adj = path_adj(4)
    assert tree_decompose(adj, 4).parts == [[0, 1, 2, 3]]
    star = [list(range(1, 10))] + [[0] for _ in range(9)]
    dec = tree_decompose(star, 3)
    assert tree_decomposition_violations(star, dec.parts, 3) == []
    assert all(0 in p for p in dec.parts)


def test_tree_singletons():
    adj = path_adj(6)
    dec = tree_decompose(adj, 1)
    assert tree_decomposition_violations(adj, dec.parts, 1) == []


def test_tree_errors():
    with pytest.raises(ValueError, match="fewer than ell"):
        tree_decompose(path_adj(3), 5)
    with pytest.raises(ValueError, match="not a tree"):
        tree_decompose([[1, 2], [0, 2], [0, 1]], 1)
    with pytest.raises(ValueError, match="not a tree"):
        tree_decompose([[1], [0], [3], [2]], 1)
    with pytest.raises(ValueError):
        tree_decompose(path_adj(3), 0)


@given(st.integers(1, 300), st.integers(1, 40), st.integers(0, 2**31), st.sampled_from(["uniform", "recursive"]))
def test_tree_invariants_property(n, ell, seed, kind):
    if n < ell:
        n = ell
    adj = random_tree(n, np.random.default_rng(seed), kind)
    dec = tree_decompose(adj, ell)
    assert tree_decomposition_violations(adj, dec.parts, ell) == []


def test_matching_examples():
    m = 6
    L = [f"a{i}" for i in range(m)]
    R = [f"b{i}" for i in range(m)]
    assert max_bipartite_matching(L, R, list(zip(L, R))) == m
    assert max_bipartite_matching(["x"], R, [("x", r) for r in R]) == 1
    assert max_bipartite_matching(L, R, []) == 0
    with pytest.raises(ValueError, match="declared sides"):
        max_bipartite_matching(L, R, [("a0", "zzz")])
    with pytest.raises(ValueError, match="overlap"):
        max_bipartite_matching([1, 2], [2, 3], [])


def test_matching_against_exhaustive():
    rng = np.random.default_rng(5)
    for _ in range(500):
        nl, nr = int(rng.integers(1, 21)), int(rng.integers(1, 13))
        dens = rng.uniform(0.02, 0.5)
        E = [(a, b) for a in range(nl) for b in range(nr) if rng.random() < dens]
        got = max_bipartite_matching([("l", a) for a in range(nl)], [("r", b) for b in range(nr)],
                                     [(("l", a), ("r", b)) for a, b in E])
        assert got == brute_matching(nl, nr, E)
        assert got <= min(nl, nr)


def test_matching_large_against_networkx():
    rng = np.random.default_rng(6)
    for _ in range(100):
        nl, nr = int(rng.integers(1, 21)), int(rng.integers(1, 21))
        E = [(a, nl + b) for a in range(nl) for b in range(nr) if rng.random() < 0.15]
        g = nx.Graph(E)
        g.add_nodes_from(range(nl + nr))
        want = len(nx.bipartite.hopcroft_karp_matching(g, top_nodes=range(nl))) // 2
        assert max_bipartite_matching(range(nl), range(nl, nl + nr), E) == want


def _random_ab(rng, n):
    perm = rng.permutation(n)
    a, b = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    return perm[:a], perm[a : a + b]


def test_disjoint_paths_against_exhaustive():
    rng = np.random.default_rng(7)
    for _ in range(200):
        G = graph(["C5xC4", "P4xK3", "Q4", "C3xP3", "K3^3"][int(rng.integers(5))])
        s = sample_percolation(G, float(rng.uniform(0.2, 0.8)), int(rng.integers(2**31)))
        A, B = _random_ab(rng, G.n)
        maxlen = int(rng.integers(1, 6))
        got = count_disjoint_short_paths(G, s, VertexSubset.of(G, A), VertexSubset.of(G, B), maxlen)
        g = sample_to_networkx(s)
        assert got == layered_paths_bruteforce(g, A.tolist(), B.tolist(), maxlen)
        assert got <= min(len(A), len(B))


def test_disjoint_paths_maxlen_one_is_matching():
    rng = np.random.default_rng(8)
    for _ in range(100):
        G = graph("Q5")
        s = sample_percolation(G, 0.5, int(rng.integers(2**31)))
        perm = rng.permutation(G.n)
        A, B = perm[:8], perm[8:16]
        src, dst = s.endpoints
        aset, bset = set(A.tolist()), set(B.tolist())
        E = [(u, v) if u in aset else (v, u) for u, v in zip(src.tolist(), dst.tolist())
             if (u in aset and v in bset) or (v in aset and u in bset)]
        got = count_disjoint_short_paths(G, s, VertexSubset.of(G, A), VertexSubset.of(G, B), 1)
        assert got == max_bipartite_matching(A.tolist(), B.tolist(), E)


def test_disjoint_paths_examples():
    G = graph("P6")
    full = EdgeSample(G, 1.0, None, np.ones(G.edge_count, dtype=bool))
    A, B = VertexSubset.of(G, [0]), VertexSubset.of(G, [5])
    assert count_disjoint_short_paths(G, full, A, B, 5) == 1
    assert count_disjoint_short_paths(G, full, A, B, 4) == 0
    with pytest.raises(ValueError, match="overlap"):
        count_disjoint_short_paths(G, full, A, A, 3)
    with pytest.raises(ValueError):
        count_disjoint_short_paths(G, full, A, B, 7)


def test_connected_sampler():
    G = graph("Q10")
    s = sample_percolation(G, eps_to_p(0.5, 10), 3)
    lab = label_components(G, s)
    g = sample_to_networkx(s)
    rng = np.random.default_rng(1)
    giant = set(lab.giant_vertices().tolist())
    for i in range(2000):
        k = int(rng.integers(1, 60))
        S = sample_connected_subset(G, s, k, seed=i, labeling=lab)
        verts = S.vertices().tolist()
        assert S.size == k and set(verts) <= giant
        assert nx.is_connected(g.subgraph(verts))
    whole = sample_connected_subset(G, s, lab.giant_size, seed=0, labeling=lab)
    assert set(whole.vertices().tolist()) == giant
    with pytest.raises(ValueError):
        sample_connected_subset(G, s, lab.giant_size + 1, seed=0, labeling=lab)


def test_audit_edge_cases():
    G = graph("Q10")
    s = sample_percolation(G, eps_to_p(0.5, 10), 4)
    lab = label_components(G, s)
    rep = audit_expansion(G, s, eps=0.5, c=0.05, sizes=[lab.giant_size], draws=5, labeling=lab)
    assert len(rep.rows) == 1
    row = rep.rows[0]
    assert row.boundary == 0 and row.passed is None and rep.out_of_range_sizes() == [lab.giant_size]
    rep = audit_expansion(G, s, eps=0.5, c=0.05, sizes=[1], draws=50, labeling=lab, seed=2)
    deg = np.diff(s.adjacency[0])
    for r in rep.rows:
        assert r.neighborhood == r.boundary >= 1
    assert set(r.neighborhood for r in rep.rows) <= set(deg.tolist())
    assert rep.to_csv().splitlines()[0] == ",".join(EXPANSION_COLUMNS)


def test_audit_counts_match_direct_evaluation():
    G = graph("Q9")
    s = sample_percolation(G, eps_to_p(0.6, 9), 5)
    g = sample_to_networkx(s)
    for mode in ("connected", "arbitrary"):
        rep = audit_expansion(G, s, eps=0.6, c=0.05, sizes=[5, 20], draws=3, mode=mode)
        assert len(rep.rows) == 6
        for r in rep.rows:
            assert r.connected == (mode == "connected")
            assert 0 <= r.neighborhood <= r.boundary


def test_thresholds_golden():
    """Thresholds are pure functions of (mode, k, c, eps, d, n); frozen in a golden file."""
    rows = json.loads((GOLDEN / "thresholds.json").read_text())
    assert len(rows) >= 10
    for row in rows:
        regime, qty, thr = expansion_threshold(
            row["mode"], row["k"], c=row["c"], eps=row["eps"], d=row["d"], n=row["n"],
            giant_size=row["giant_size"], small_lower=row["small_lower"],
        )
        assert (regime, qty) == (row["regime"], row["quantity"])
        if row["threshold"] is None:
            assert math.isnan(thr)
        else:
            assert thr == pytest.approx(row["threshold"], rel=1e-12)


def test_threshold_formulas():
    n, d = 2**14, 14
    dlnd = d * math.log(d)
    assert expansion_threshold("connected", 1, c=0.1, eps=0.3, d=d, n=n, giant_size=5000) == (
        "connected_small", "neighborhood", pytest.approx(0.1))
    assert expansion_threshold("connected", 2, c=0.1, eps=0.3, d=d, n=n, giant_size=5000)[0] == "connected_medium"
    reg, qty, thr = expansion_threshold("connected", 300, c=0.1, eps=0.3, d=d, n=n, giant_size=5000)
    assert (reg, qty) == ("connected_medium", "boundary") and thr == pytest.approx(30 * math.log(n / 300) / dlnd)
    reg, qty, thr = expansion_threshold("arbitrary", 300, c=0.1, eps=0.3, d=d, n=n, giant_size=5000)
    assert (reg, qty) == ("arbitrary", "boundary") and thr == pytest.approx(30 / dlnd)
    k = math.floor(0.09 * n)
    assert expansion_threshold("arbitrary", k, c=1, eps=0.3, d=d, n=n, giant_size=5000)[0] == "arbitrary_large"
    assert expansion_threshold("connected", 3, c=1, eps=0.3, d=d, n=n, giant_size=5000, small_lower=4)[0] == "out_of_range"
    assert expansion_threshold("arbitrary", 7400, c=1, eps=0.3, d=d, n=n, giant_size=9000)[0] == "out_of_range"
    with pytest.raises(ValueError):
        expansion_threshold("weird", 3, c=1, eps=0.3, d=d, n=n, giant_size=5000)


def test_extract_zero_target_keeps_giant():
    G = graph("Q10")
    s = sample_percolation(G, eps_to_p(0.3, 10), 1)
    lab = label_components(G, s)
    res = extract_expander(G, s, 0.0, 0.3, labeling=lab)
    assert np.array_equal(res.vertices, lab.giant_vertices()) and res.log == []


def test_extract_full_hypercube():
    G = graph("Q10")
    full = EdgeSample(G, 1.0, None, np.ones(G.edge_count, dtype=bool))
    res = extract_expander(G, full, 0.5, 0.3, seed=1)
    assert res.size == G.n and res.log == []


def test_extract_invariants():
    G = graph("Q13")
    eps = 0.3
    for seed in range(3):
        s = sample_percolation(G, eps_to_p(eps, 13), 700 + seed)
        lab = label_components(G, s)
        res = extract_expander(G, s, 0.4, eps, seed=seed, labeling=lab)
        assert set(res.vertices.tolist()) <= set(lab.giant_vertices().tolist())
        assert res.size >= eps * G.n / 2
        assert sum(e["removed_size"] for e in res.log) == lab.giant_size - res.size
        for e in res.log:
            assert e["neighborhood"] < e["threshold"] and e["violation"] < 1
        for line in res.log_jsonl().splitlines():
            assert set(json.loads(line)) == {"iteration", "removed_size", "neighborhood", "threshold", "violation"}


def test_extract_unachievable_target():
    G = graph("Q12")
    s = sample_percolation(G, eps_to_p(0.2, 12), 701)
    with pytest.raises(ValueError, match="unachievable at this scale"):
        extract_expander(G, s, 50.0, 0.2)
