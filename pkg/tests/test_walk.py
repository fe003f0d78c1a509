import math
from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from prodperc import walk
from prodperc.graph import GuardError
from prodperc.view import ComponentView, giant_view
from prodperc.walk import (
    ConductanceReport,
    LevelEstimate,
    WalkDistribution,
    conductance,
    fr_mixing_bound,
    lazy_step,
    mixing_time_exact,
    phi_profile,
    stationary_distribution,
    tv_distance,
)

from .conftest import random_small_sample


def nxview(g):
    return ComponentView.from_networkx(g)


def matrix_mixing_time(g: nx.Graph) -> int:
    """Dense matrix-power oracle for the lazy walk."""
    A = nx.to_numpy_array(g, nodelist=sorted(g.nodes()))
    deg = A.sum(axis=1)
    P = 0.5 * np.eye(len(A)) + 0.5 * A / deg[:, None]
    pi = deg / deg.sum()
    Pt = np.eye(len(A))
    t = 0
    while 0.5 * np.abs(Pt - pi[None, :]).sum(axis=1).max() > 0.25:
        Pt = Pt @ P
        t += 1
    return t


def random_connected_views(rng, count, max_size=2000):
    out = []
    while len(out) < count:
        v = giant_view(random_small_sample(rng))
        if 2 <= v.size <= max_size:
            out.append(v)
    return out


def test_stationary_examples():
    assert stationary_distribution(nxview(nx.complete_graph(2))).probs.tolist() == [0.5, 0.5]
    pi = stationary_distribution(nxview(nx.star_graph(3))).probs
    assert pi == pytest.approx([1 / 2, 1 / 6, 1 / 6, 1 / 6], abs=1e-15)
    pi = stationary_distribution(nxview(nx.cycle_graph(7))).probs
    assert np.allclose(pi, 1 / 7)
    with pytest.raises(ValueError):
        stationary_distribution(ComponentView.from_edges(2, []))


def test_lazy_step_examples():
    k2 = nxview(nx.complete_graph(2))
    assert lazy_step(k2, WalkDistribution.point(2, 0)).probs.tolist() == [0.5, 0.5]
    with pytest.raises(ValueError):
        lazy_step(k2, WalkDistribution.point(3, 0))


def test_stationarity_and_mass_conservation():
    rng = np.random.default_rng(14)
    for v in random_connected_views(rng, 100, 500):
        pi = stationary_distribution(v)
        assert np.abs(lazy_step(v, pi).probs - pi.probs).max() <= 1e-12
        p = rng.dirichlet(np.ones(v.size))
        out = lazy_step(v, WalkDistribution(p)).probs
        assert abs(out.sum() - 1) <= 1e-12 and out.min() >= 0


def test_distribution_validation():
    with pytest.raises(ValueError):
        WalkDistribution(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        WalkDistribution(np.array([1.5, -0.5]))


def test_tv_examples():
    a = WalkDistribution(np.array([1.0, 0.0]))
    assert tv_distance(a, a) == 0
    assert tv_distance(a, WalkDistribution(np.array([0.0, 1.0]))) == 1
    assert tv_distance(a, WalkDistribution(np.array([0.5, 0.5]))) == 0.5
    with pytest.raises(ValueError):
        tv_distance(a, WalkDistribution.point(3, 0))


def test_mixing_examples():
    assert mixing_time_exact(nxview(nx.complete_graph(2))) == 1
    for m in (3, 5, 8, 12):
        g = nx.complete_graph(m)
        t = mixing_time_exact(nxview(g))
        assert t == matrix_mixing_time(g) and t <= 3


def test_mixing_matches_matrix_oracle():
    rng = np.random.default_rng(15)
    for v in random_connected_views(rng, 30, 200):
        g = nx.Graph(list(zip(*[a.tolist() for a in v.edge_list])))
        assert mixing_time_exact(v) == matrix_mixing_time(g)


def test_two_cliques_mix_slower():
    m = 8
    g = nx.disjoint_union(nx.complete_graph(m), nx.complete_graph(m))
    g.add_edge(0, m)
    assert mixing_time_exact(nxview(g)) > mixing_time_exact(nxview(nx.complete_graph(2 * m)))


def test_mixing_guards():
    with pytest.raises(GuardError, match="cap"):
        mixing_time_exact(nxview(nx.path_graph(40)), cap=5)
    with pytest.raises(GuardError):
        mixing_time_exact(nxview(nx.path_graph(walk.MIXING_MAX_VERTICES + 1)))


def test_conductance_examples():
    c4 = nxview(nx.cycle_graph(4))
    phi, pi_s, q = conductance(c4, [0, 1])
    assert (phi, pi_s, q) == (0.5, 0.5, 2 / 16)
    # disconnected sets use the same formula
    assert conductance(c4, [0, 2])[0] == pytest.approx(4 / (2 * 4 * 0.5))
    with pytest.raises(ValueError):
        conductance(c4, [])
    with pytest.raises(ValueError):
        conductance(c4, [0, 1, 2, 3])


def test_conductance_complement_symmetry():
    rng = np.random.default_rng(16)
    views = random_connected_views(rng, 50, 300)
    for i in range(500):
        v = views[i % len(views)]
        if v.size < 2:
            continue
        m = rng.random(v.size) < rng.uniform(0.1, 0.9)
        if m.all() or not m.any():
            continue
        a, b = conductance(v, m), conductance(v, ~m)
        assert a[0] == pytest.approx(b[0], rel=1e-12) and a[2] == b[2]


def brute_profile(v: ComponentView):
    """Exact Phi(2^-j) by enumerating every connected vertex set, in rational arithmetic."""
    g = nx.Graph(list(zip(*[a.tolist() for a in v.edge_list])))
    deg = {x: g.degree(x) for x in g}
    vt = 2 * g.number_of_edges()
    pi_min = Fraction(min(deg.values()), vt)
    L = max(1, math.ceil(math.log2(1 / pi_min) - 1e-12))
    best = [None] * L
    for k in range(1, v.size):
        for S in combinations(range(v.size), k):
            vol = sum(deg[x] for x in S)
            piS = Fraction(vol, vt)
            js = [j for j in range(1, L + 1) if Fraction(1, 2 ** (j + 1)) <= piS <= Fraction(1, 2**j)]
            if not js or not nx.is_connected(g.subgraph(S)):
                continue
            cut = nx.cut_size(g, S)
            phi = Fraction(cut, 2 * vol) / (1 - piS)
            for j in js:
                if best[j - 1] is None or phi < best[j - 1]:
                    best[j - 1] = phi
    return [1.0 if b is None else float(b) for b in best]


def test_exhaustive_profile_matches_brute_force():
    rng = np.random.default_rng(17)
    count = 0
    while count < 25:
        v = giant_view(random_small_sample(rng, exprs=("Q4", "K3xC4", "P4xK3", "C3xC5")))
        if not 4 <= v.size <= 14:
            continue
        rep = phi_profile(v)
        assert rep.exact
        assert rep.phis() == pytest.approx(brute_profile(v), rel=1e-12)
        for lv in rep.levels:
            if lv.best:
                assert conductance(v, lv.best)[0] == pytest.approx(lv.phi, rel=1e-12)
        count += 1


def test_empty_level_defaults_to_one():
    # K_{1,3}: pi = (1/2, 1/6, 1/6, 1/6), levels j = 1, 2, 3
    rep = phi_profile(nxview(nx.star_graph(3)))
    assert len(rep.levels) == 3
    # no connected set has pi in [1/16, 1/8]
    assert rep.levels[2].phi == 1.0 and rep.levels[2].best == []


def test_probed_profile_upper_bounds_exact(monkeypatch):
    rng = np.random.default_rng(18)
    views = []
    while len(views) < 15:
        v = giant_view(random_small_sample(rng, exprs=("Q4", "K3xC4", "P4xK3")))
        if 6 <= v.size <= 16:
            views.append(v)
    exact = [phi_profile(v).phis() for v in views]
    monkeypatch.setattr(walk, "EXHAUSTIVE_PHI_MAX", 0)
    for v, ex in zip(views, exact):
        rep = phi_profile(v, probes=10, seed=1)
        assert not rep.exact
        for got, want in zip(rep.phis(), ex):
            assert got >= want - 1e-12
        for lv in rep.levels:
            if lv.best:
                assert v.induced(lv.best).is_connected()


def test_fr_bound():
    rep = ConductanceReport([LevelEstimate(j, 1.0, 0) for j in range(1, 6)], True, 1 / 32)
    assert fr_mixing_bound(rep, 1.0) == 5
    rep = phi_profile(nxview(nx.cycle_graph(12)))
    assert fr_mixing_bound(rep, 2.0) == pytest.approx(2 * fr_mixing_bound(rep, 1.0))
    with pytest.raises(ValueError):
        fr_mixing_bound(ConductanceReport([], True, 1.0), 1.0)
    assert rep.to_json().startswith("{")
