"""Whole-graph statistics: components, clustering, triangles, distances.

Component statistics use the directed graph; clustering, triangles and
distances use the undirected projection. Distances come from a bit-parallel
BFS that advances 64 sources per sweep over a CSR adjacency.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from motifscope.graph import DirectedGraph, UndirectedView

__all__ = [
    "ClusteringResult",
    "Components",
    "DiameterResult",
    "GraphSummary",
    "bfs_distance_histogram",
    "clustering_and_triangles",
    "effective_diameter",
    "exact_diameter",
    "interpolate_effective_diameter",
    "strongly_connected_components",
    "summarize",
    "weakly_connected_components",
]


@dataclass
class Components:
    """Component labelling; labels are ``0..count-1`` in discovery order."""

    labels: list[int]
    count: int
    largest: int
    largest_nodes: int
    largest_edges: int

    def members(self, label: int) -> list[int]:
        return [u for u, c in enumerate(self.labels) if c == label]


def _finish(g: DirectedGraph, labels: list[int], count: int) -> Components:
    if count == 0:
        return Components(labels, 0, -1, 0, 0)
    sizes = [0] * count
    for c in labels:
        sizes[c] += 1
    largest = max(range(count), key=lambda c: (sizes[c], -c))
    edges = sum(
        1 for u, nbrs in enumerate(g.out_adj) if labels[u] == largest for v in nbrs if labels[v] == largest
    )
    return Components(labels, count, largest, sizes[largest], edges)


def weakly_connected_components(g: DirectedGraph) -> Components:
    n = g.node_count
    labels = [-1] * n
    count = 0
    out_adj, in_adj = g.out_adj, g.in_adj
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = count
        stack = [s]
        while stack:
            u = stack.pop()
            for nbrs in (out_adj[u], in_adj[u]):
                for v in nbrs:
                    if labels[v] < 0:
                        labels[v] = count
                        stack.append(v)
        count += 1
    return _finish(g, labels, count)


def strongly_connected_components(g: DirectedGraph) -> Components:
    """Iterative Tarjan; labels follow the order components are closed."""
    n = g.node_count
    out_adj = g.out_adj
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    labels = [-1] * n
    stack: list[int] = []
    counter = 0
    count = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, 0)]
        while work:
            u, i = work[-1]
            nbrs = out_adj[u]
            if i < len(nbrs):
                work[-1] = (u, i + 1)
                v = nbrs[i]
                if index[v] < 0:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, 0))
                elif on_stack[v] and index[v] < low[u]:
                    low[u] = index[v]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[u] < low[parent]:
                    low[parent] = low[u]
            if low[u] == index[u]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    labels[w] = count
                    if w == u:
                        break
                count += 1
    return _finish(g, labels, count)


@dataclass
class ClusteringResult:
    avg_clustering: float
    triangles: int
    wedges: int
    closed_triangle_fraction: float
    node_triangles: list[int]


def clustering_and_triangles(u: UndirectedView) -> ClusteringResult:
    """Average local clustering (degree < 2 counts as 0), triangles, wedges.

    Triangles are counted once each by orienting every edge from lower to
    higher ``(degree, id)`` rank and intersecting forward neighbourhoods.
    """
    adj = u.adj
    n = len(adj)
    deg = [len(a) for a in adj]
    fwd = [{v for v in nbrs if (deg[v], v) > (deg[x], x)} for x, nbrs in enumerate(adj)]
    tri = [0] * n
    total = 0
    for x in range(n):
        fx = fwd[x]
        for y in fx:
            common = fx & fwd[y]
            if common:
                c = len(common)
                total += c
                tri[x] += c
                tri[y] += c
                for z in common:
                    tri[z] += 1
    wedges = 0
    cc_sum = 0.0
    for x in range(n):
        d = deg[x]
        if d >= 2:
            pairs = d * (d - 1) // 2
            wedges += pairs
            cc_sum += tri[x] / pairs
    avg = cc_sum / n if n else 0.0
    closed = 3 * total / wedges if wedges else 0.0
    return ClusteringResult(avg, total, wedges, closed, tri)


def _bit_bfs(
    indptr: np.ndarray, indices: np.ndarray, sources: Sequence[int]
) -> tuple[list[int], list[int]]:
    """BFS from up to 64 sources at once.

    Returns ``(hist, ecc)``: ``hist[d]`` is the number of (source, node)
    pairs at distance ``d`` and ``ecc[b]`` the eccentricity of ``sources[b]``
    within its component.
    """
    n = len(indptr) - 1
    nb = len(sources)
    assert 0 < nb <= 64
    visited = np.zeros(n, dtype=np.uint64)
    for b, s in enumerate(sources):
        visited[s] |= np.uint64(1) << np.uint64(b)
    frontier = visited.copy()
    starts = indptr[:-1]
    nonempty = indptr[1:] > starts
    gathered = np.zeros(len(indices) + 1, dtype=np.uint64)
    hist = [int(np.bitwise_count(visited).sum())]
    ecc = [0] * nb
    level = 0
    while True:
        level += 1
        np.take(frontier, indices, out=gathered[:-1])
        nxt = np.bitwise_or.reduceat(gathered, starts)
        nxt[~nonempty] = 0
        nxt &= ~visited
        reached = int(np.bitwise_count(nxt).sum())
        if not reached:
            break
        visited |= nxt
        frontier = nxt
        hist.append(reached)
        grew = int(np.bitwise_or.reduce(nxt))
        for b in range(nb):
            if grew >> b & 1:
                ecc[b] = level
    return hist, ecc


def bfs_distance_histogram(
    u: UndirectedView, sources: Iterable[int]
) -> tuple[list[int], dict[int, int]]:
    """Pair-distance histogram over ``sources`` and each source's eccentricity."""
    indptr, indices = u.csr
    sources = list(sources)
    hist: list[int] = []
    ecc: dict[int, int] = {}
    for i in range(0, len(sources), 64):
        batch = sources[i : i + 64]
        h, e = _bit_bfs(indptr, indices, batch)
        if len(h) > len(hist):
            hist.extend([0] * (len(h) - len(hist)))
        for d, c in enumerate(h):
            hist[d] += c
        ecc.update(zip(batch, e))
    return hist, ecc


def interpolate_effective_diameter(hist: Sequence[int], q: float = 0.9) -> float:
    """Smallest ``d`` with ``g(d) = q`` under linear interpolation.

    ``g(d)`` is the fraction of reachable pairs (source excluded) within
    ``d`` hops; ``g(0) = 0``.
    """
    counts = list(hist[1:])
    total = sum(counts)
    if total == 0:
        return 0.0
    cum_prev = 0.0
    running = 0
    for d, c in enumerate(counts, 1):
        running += c
        cum = running / total
        if cum >= q:
            return (d - 1) + (q - cum_prev) / (cum - cum_prev)
        cum_prev = cum
    return float(len(counts))


def effective_diameter(
    u: UndirectedView, sample_sources: int = 1000, seed: int = 42, q: float = 0.9
) -> float:
    """Interpolated ``q``-percentile distance from uniformly sampled sources."""
    if sample_sources < 1:
        raise ValueError("sample_sources must be >= 1")
    n = u.node_count
    sources = sorted(random.Random(seed).sample(range(n), min(sample_sources, n)))
    hist, _ = bfs_distance_histogram(u, sources)
    return interpolate_effective_diameter(hist, q)


@dataclass
class DiameterResult:
    value: int
    exact: bool
    sources_done: int


def exact_diameter(u: UndirectedView, time_budget: float | None = None) -> DiameterResult:
    """Longest shortest path inside the largest connected component.

    With ``time_budget`` (seconds) the sweep stops early and the value is a
    lower bound (``exact=False``).
    """
    comp = weakly_connected_components(u.graph)
    sources = comp.members(comp.largest) if comp.count else []
    indptr, indices = u.csr
    start = time.perf_counter()
    best = 0
    done = 0
    for i in range(0, len(sources), 64):
        if time_budget is not None and time.perf_counter() - start > time_budget:
            return DiameterResult(best, False, done)
        batch = sources[i : i + 64]
        _, ecc = _bit_bfs(indptr, indices, batch)
        best = max(best, max(ecc))
        done += len(batch)
    return DiameterResult(best, True, done)


@dataclass
class GraphSummary:
    nodes: int
    edges: int
    wcc_nodes: int
    wcc_edges: int
    scc_nodes: int
    scc_edges: int
    avg_clustering: float
    triangles: int
    wedges: int
    closed_triangle_fraction: float
    effective_diameter_90: float
    diameter: int | None = None
    diameter_exact: bool | None = None
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def rows(self) -> list[tuple[str, str]]:
        """Label/value pairs laid out like the classic dataset statistics table."""

        def frac(part: int, whole: int) -> str:
            return f"{part} ({part / whole:.3f})" if whole else str(part)

        rows = [
            ("Nodes", str(self.nodes)),
            ("Edges", str(self.edges)),
            ("Nodes in largest WCC", frac(self.wcc_nodes, self.nodes)),
            ("Edges in largest WCC", frac(self.wcc_edges, self.edges)),
            ("Nodes in largest SCC", frac(self.scc_nodes, self.nodes)),
            ("Edges in largest SCC", frac(self.scc_edges, self.edges)),
            ("Average clustering coefficient", f"{self.avg_clustering:.4f}"),
            ("Number of triangles", str(self.triangles)),
            ("Fraction of closed triangles", f"{self.closed_triangle_fraction:.4f}"),
        ]
        if self.diameter is not None:
            suffix = "" if self.diameter_exact else " (lower bound)"
            rows.append(("Diameter (longest shortest path)", f"{self.diameter}{suffix}"))
        rows.append(("90-percentile effective diameter", f"{self.effective_diameter_90:.4f}"))
        return rows


def summarize(
    g: DirectedGraph,
    *,
    sample_sources: int = 1000,
    seed: int = 42,
    diameter: bool = False,
    diameter_budget: float | None = None,
) -> GraphSummary:
    u = UndirectedView(g)
    wcc = weakly_connected_components(g)
    scc = strongly_connected_components(g)
    cl = clustering_and_triangles(u)
    eff = effective_diameter(u, sample_sources, seed) if g.node_count else 0.0
    summary = GraphSummary(
        nodes=g.node_count,
        edges=g.edge_count,
        wcc_nodes=wcc.largest_nodes,
        wcc_edges=wcc.largest_edges,
        scc_nodes=scc.largest_nodes,
        scc_edges=scc.largest_edges,
        avg_clustering=cl.avg_clustering,
        triangles=cl.triangles,
        wedges=cl.wedges,
        closed_triangle_fraction=cl.closed_triangle_fraction,
        effective_diameter_90=eff,
        dropped_self_loops=g.dropped_self_loops,
        dropped_duplicates=g.dropped_duplicates,
    )
    if diameter:
        d = exact_diameter(u, diameter_budget)
        summary.diameter = d.value
        summary.diameter_exact = d.exact
    return summary
