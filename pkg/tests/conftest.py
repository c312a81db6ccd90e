from __future__ import annotations

import os
import random
from pathlib import Path

import pytest

from motifscope.graph import build_from_edges

DATA_ENV = "MOTIFSCOPE_AMAZON0302"


def random_digraph_edges(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    return [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < p]


def graph_on(n: int, edges):
    """Graph whose compacted IDs equal ``0..n-1`` even with isolated nodes."""
    from motifscope.graph import DirectedGraph

    out = [[] for _ in range(n)]
    for a, b in edges:
        out[a].append(b)
    return DirectedGraph.from_adjacency(out)


def cliques_with_bridge(sizes=(5, 5), directed_both=True):
    """Disjoint cliques on consecutive IDs, first nodes chained by one bridge each."""
    edges = []
    start = 0
    firsts = []
    for size in sizes:
        nodes = range(start, start + size)
        firsts.append(start)
        for a in nodes:
            for b in nodes:
                if a < b:
                    edges.append((a, b))
                    if directed_both:
                        edges.append((b, a))
        start += size
    for a, b in zip(firsts, firsts[1:]):
        edges.append((a, b))
    return edges


@pytest.fixture
def three_cycle():
    return build_from_edges([(0, 1), (1, 2), (2, 0)])


def amazon_path() -> Path | None:
    env = os.environ.get(DATA_ENV)
    candidates = [Path(env)] if env else []
    here = Path(__file__).resolve().parent.parent
    candidates += [here / "data" / "amazon0302.txt.gz", here / "data" / "amazon0302.txt"]
    for c in candidates:
        if c.is_file():
            return c
    return None


@pytest.fixture(scope="session")
def amazon_graph():
    path = amazon_path()
    if path is None:
        pytest.fail(
            f"amazon0302 snapshot not found; set {DATA_ENV} or place data/amazon0302.txt.gz "
            "(https://snap.stanford.edu/data/amazon0302.html)",
            pytrace=False,
        )
    from motifscope.ingest import read_graph

    return read_graph(path)


_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if "test_acceptance.py" in report.nodeid:
            name = report.nodeid.split("::")[-1]
            _ACCEPTANCE.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{status:5} {name}")
