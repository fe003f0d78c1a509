import networkx as nx
import numpy as np
import pytest
from hypothesis import settings

from prodperc.graph import graph
from prodperc.percolation import sample_percolation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def q3():
    return graph("Q3")


@pytest.fixture(scope="session")
def k3sq():
    return graph("K3^2")


def sample_to_networkx(s) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(s.graph.n))
    src, dst = s.endpoints
    g.add_edges_from(zip(src.tolist(), dst.tolist()))
    return g


def random_small_sample(rng, exprs=("Q5", "K3^3", "C5xC4", "P4xK3", "K4xC3", "Q3xK3")):
    G = graph(exprs[int(rng.integers(len(exprs)))])
    return sample_percolation(G, float(rng.uniform(0.05, 0.95)), int(rng.integers(2**31)))


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
