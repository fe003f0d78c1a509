import math

import numpy as np
import pytest

from prodperc import percolation as perc
from prodperc.graph import graph
from prodperc.percolation import (
    eps_to_p,
    high_degree_census,
    load_sample,
    merge_samples,
    sample_from_hex,
    sample_percolation,
    sample_to_hex,
    save_sample,
    two_round_split,
)


@pytest.fixture(scope="module")
def q11():
    return graph("Q11")


def test_extremes(q3):
    assert sample_percolation(q3, 0.0, 1).retained_count == 0
    assert sample_percolation(q3, 1.0, 1).retained_count == 12
    for bad in (-0.1, 1.5, float("nan")):
        with pytest.raises(ValueError):
            sample_percolation(q3, bad, 1)


def test_deterministic_and_seed_sensitive(q11):
    a = sample_percolation(q11, 0.3, 42)
    b = sample_percolation(q11, 0.3, 42)
    c = sample_percolation(q11, 0.3, 43)
    assert np.array_equal(a.mask, b.mask)
    assert not np.array_equal(a.mask, c.mask)


def test_independent_of_threads_and_chunking(q11, monkeypatch):
    ref = sample_percolation(q11, 0.2, 7).mask
    monkeypatch.setattr(perc, "_CHUNK", 1000)
    assert np.array_equal(sample_percolation(q11, 0.2, 7, threads=1).mask, ref)
    assert np.array_equal(sample_percolation(q11, 0.2, 7, threads=4).mask, ref)
    # uniforms depend only on the edge id
    u = perc.edge_uniforms(7, 0, q11.edge_count)
    assert np.array_equal(np.concatenate([perc.edge_uniforms(7, 0, 5000), perc.edge_uniforms(7, 5000, q11.edge_count)]), u)


def test_nested_in_p(q11):
    lo = sample_percolation(q11, 0.1, 5).mask
    hi = sample_percolation(q11, 0.4, 5).mask
    assert not np.any(lo & ~hi)


def test_binomial_mean_q10():
    G = graph("Q10")
    p = eps_to_p(0.1, 10)
    counts = np.array([sample_percolation(G, p, s).retained_count for s in range(100)])
    mean, var = G.edge_count * p, G.edge_count * p * (1 - p)
    assert abs(counts.mean() - mean) <= 3 * math.sqrt(var / 100)


def test_binomial_mean_and_variance(q11):
    p = 0.13
    counts = np.array([sample_percolation(q11, p, 1000 + s).retained_count for s in range(200)])
    mean, var = q11.edge_count * p, q11.edge_count * p * (1 - p)
    assert abs(counts.mean() - mean) <= 3 * math.sqrt(var / 200)
    assert 0.5 <= counts.var(ddof=1) / var <= 2.0


def test_sprinkling_matches_direct(q11):
    p = eps_to_p(0.2, 11)
    pair = two_round_split(p, 0.2**3 / 11)
    direct = np.array([sample_percolation(q11, p, s).retained_count for s in range(200)])
    merged = np.array(
        [
            merge_samples(sample_percolation(q11, pair.p1, s), sample_percolation(q11, pair.p2, 10_000 + s)).retained_count
            for s in range(200)
        ]
    )
    se = math.sqrt(direct.var(ddof=1) / 200 + merged.var(ddof=1) / 200)
    assert abs(direct.mean() - merged.mean()) <= 3 * se


def test_two_round_split_examples():
    assert two_round_split(0.5, 0.1).p1 == pytest.approx(4 / 9, abs=1e-15)
    assert two_round_split(0.3, 0.0).p1 == 0.3
    eps, d = 0.2, 20
    delta = eps**3
    pair = two_round_split((1 + eps) / d, delta / d)
    assert pair.p1 >= (1 + eps - delta) / d
    assert abs((1 - pair.p1) * (1 - pair.p2) - (1 - pair.p)) <= 1e-15
    with pytest.raises(ValueError):
        two_round_split(0.1, 0.2)
    with pytest.raises(ValueError):
        two_round_split(1.0, 0.1)


def test_merge(q11):
    s = sample_percolation(q11, 0.2, 3)
    empty = sample_percolation(q11, 0.0, 4)
    m = merge_samples(s, empty)
    assert m is s
    assert merge_samples(s, s) is s
    t = sample_percolation(q11, 0.1, 9)
    u = merge_samples(s, t)
    assert u.p == pytest.approx(1 - 0.8 * 0.9) and u.seed is None
    assert u.retained_count == np.count_nonzero(s.mask | t.mask)
    with pytest.raises(ValueError):
        merge_samples(s, sample_percolation(graph("Q3"), 0.5, 1))


def test_merged_fraction_statistical(q11):
    pair = two_round_split(0.15, 0.05)
    fr = [
        merge_samples(sample_percolation(q11, pair.p1, s), sample_percolation(q11, pair.p2, 500 + s)).retained_count
        / q11.edge_count
        for s in range(100)
    ]
    se = math.sqrt(0.15 * 0.85 / q11.edge_count / 100)
    assert abs(np.mean(fr) - 0.15) <= 3 * se


def test_census_examples():
    G = graph("Q8")
    assert high_degree_census(G, sample_percolation(G, 0.0, 1)) == 0
    assert high_degree_census(G, sample_percolation(G, 1.0, 1)) == G.n
    s = sample_percolation(G, 0.3, 2)
    assert high_degree_census(G, s, threshold=2) == int(np.sum(s.degrees >= 2))
    with pytest.raises(ValueError):
        high_degree_census(graph("P3xK2"), sample_percolation(graph("P3xK2"), 0.5, 1))


def test_binary_roundtrip(tmp_path, q11):
    s = sample_percolation(q11, 0.21, 77)
    path = tmp_path / "s.bin"
    save_sample(path, s)
    raw = path.read_bytes()
    assert raw[:4] == b"PPES"
    back = load_sample(path, q11)
    assert np.array_equal(back.mask, s.mask) and back.p == s.p and back.seed == 77
    with pytest.raises(ValueError):
        load_sample(path, graph("Q10"))


def test_hex_roundtrip(q3):
    s = sample_percolation(q3, 0.5, 3)
    text = sample_to_hex(s)
    assert text.splitlines()[0] == "prodperc-edge-sample 1"
    back = sample_from_hex(text, q3)
    assert np.array_equal(back.mask, s.mask) and back.seed == 3
    merged = merge_samples(s, sample_percolation(q3, 0.5, 4))
    assert sample_from_hex(sample_to_hex(merged), q3).seed is None
