"""Community detection on the undirected projection and per-community census.

Girvan–Newman removes the highest-betweenness edge repeatedly; CNM greedily
merges the community pair with the largest modularity gain. Both break ties
by the lexicographically smallest node/community pair so results are
reproducible.
"""

from __future__ import annotations

import heapq
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from motifscope.census import CensusResult, census
from motifscope.graph import DirectedGraph, UndirectedView
from motifscope.ingest import ProductRecord
from motifscope.metrics import format_ratio, metrics_table
from motifscope.motifs import build_catalog

__all__ = [
    "CNMResult",
    "CommunityEntry",
    "CommunityReport",
    "Dendrogram",
    "GNResult",
    "GNStep",
    "Partition",
    "cnm_greedy",
    "edge_betweenness",
    "girvan_newman",
    "modularity",
    "partition_from_groups",
    "pipeline",
]

UNLABELED = "unlabeled"
_TIE_EPS = 1e-9


@dataclass
class Partition:
    """Node -> community assignment with its modularity.

    Community IDs are ``0..count-1`` ordered by each community's smallest node.
    """

    assignment: list[int]
    count: int
    modularity: float

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.count)]
        for node, c in enumerate(self.assignment):
            groups[c].append(node)
        return groups


def _canonical_labels(labels: Sequence[int]) -> tuple[list[int], int]:
    remap: dict[int, int] = {}
    out = []
    for c in labels:
        if c not in remap:
            remap[c] = len(remap)
        out.append(remap[c])
    return out, len(remap)


def modularity(u: UndirectedView, partition: Partition | Sequence[int]) -> float:
    """Newman modularity of an assignment over ``u``'s edges."""
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    m = u.edge_count
    if m == 0:
        return 0.0
    intra: Counter[int] = Counter()
    degree: Counter[int] = Counter()
    for x, nbrs in enumerate(u.adj):
        cx = assignment[x]
        degree[cx] += len(nbrs)
        for y in nbrs:
            if y > x and assignment[y] == cx:
                intra[cx] += 1
    return sum(intra[c] / m - (degree[c] / (2 * m)) ** 2 for c in degree)


def partition_from_groups(u: UndirectedView, groups: Iterable[Iterable[int]]) -> Partition:
    labels = [-1] * u.node_count
    for c, members in enumerate(groups):
        for x in members:
            labels[x] = c
    if min(labels, default=0) < 0:
        raise ValueError("groups do not cover every node")
    labels, count = _canonical_labels(labels)
    return Partition(labels, count, modularity(u, labels))


def _brandes(adj: Sequence[Iterable[int]], sources: Iterable[int]) -> dict[tuple[int, int], float]:
    """Edge dependency sums over single-source shortest paths from ``sources``."""
    n = len(adj)
    eb: dict[tuple[int, int], float] = {}
    sigma = [0] * n
    dist = [-1] * n
    delta = [0.0] * n
    for s in sources:
        order = []
        preds: dict[int, list[int]] = {s: []}
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    preds[w] = [v]
                    sigma[w] = sigma[v]
                    queue.append(w)
                elif dist[w] == dv:
                    preds[w].append(v)
                    sigma[w] += sigma[v]
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                key = (v, w) if v < w else (w, v)
                eb[key] = eb.get(key, 0.0) + c
                delta[v] += c
        for v in order:
            sigma[v] = 0
            dist[v] = -1
            delta[v] = 0.0
    return eb


def edge_betweenness(u: UndirectedView) -> dict[tuple[int, int], float]:
    """Shortest-path betweenness of every edge, each node pair counted once."""
    eb = _brandes(u.adj, range(u.node_count))
    out = {e: 0.0 for e in u.edges()}
    for e, v in eb.items():
        out[e] = v / 2.0
    return out


def _component_of(adj: Sequence[set[int]], start: int) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return sorted(seen)


def _components(adj: Sequence[set[int]]) -> list[int]:
    labels = [-1] * len(adj)
    c = 0
    for s in range(len(adj)):
        if labels[s] < 0:
            for x in _component_of(adj, s):
                labels[x] = c
            c += 1
    return labels


def _pick_max(eb: Mapping[tuple[int, int], float]) -> tuple[int, int]:
    top = max(eb.values())
    floor = top - _TIE_EPS * max(1.0, top)
    return min(e for e, v in eb.items() if v >= floor)


@dataclass
class GNStep:
    edge: tuple[int, int]
    components: int
    modularity: float


@dataclass
class Dendrogram:
    """Edge removals in order; ``best_cut`` removals give the best modularity."""

    initial_components: int
    initial_modularity: float
    steps: list[GNStep]
    best_cut: int

    def modularities(self) -> list[float]:
        return [self.initial_modularity] + [s.modularity for s in self.steps]


@dataclass
class GNResult:
    dendrogram: Dendrogram
    partition: Partition


def girvan_newman(u: UndirectedView, target_communities: int | None = None) -> GNResult:
    """Divisive clustering by repeated removal of the most central edge.

    Without ``target_communities`` every edge is removed and the cut with the
    highest modularity is returned; with it, removal stops once that many
    components exist and that state is returned.
    """
    n = u.node_count
    if n == 0:
        raise ValueError("empty graph")
    adj = [set(a) for a in u.adj]
    labels = _components(adj)
    count = max(labels) + 1
    initial_q = modularity(u, labels)
    steps: list[GNStep] = []
    best_q, best_cut, best_labels = initial_q, 0, list(labels)
    done = target_communities is not None and count >= target_communities

    initial_count = count
    eb = _brandes(adj, range(n))

    while eb and not done:
        a, b = _pick_max(eb)
        adj[a].discard(b)
        adj[b].discard(a)
        del eb[(a, b)]
        # only the component that held (a, b) changes
        touched = _component_of(adj, a)
        split = b not in set(touched)
        if split:
            other = _component_of(adj, b)
            count += 1
            label_b = max(labels) + 1
            for x in other:
                labels[x] = label_b
            touched = touched + other
        for x in touched:
            for y in adj[x]:
                if x < y:
                    eb.pop((x, y), None)
        eb.update(_brandes(adj, touched))
        q = modularity(u, labels)
        steps.append(GNStep((a, b), count, q))
        if q > best_q:
            best_q, best_cut, best_labels = q, len(steps), list(labels)
        if target_communities is not None and count >= target_communities:
            done = True

    if target_communities is not None:
        best_cut, best_labels, best_q = len(steps), labels, (steps[-1].modularity if steps else initial_q)
    canon, c = _canonical_labels(best_labels)
    dendro = Dendrogram(initial_count, initial_q, steps, best_cut)
    return GNResult(dendro, Partition(canon, c, best_q))


@dataclass
class CNMResult:
    partition: Partition
    merges: list[tuple[int, int, float]] = field(default_factory=list)


def cnm_greedy(u: UndirectedView) -> CNMResult:
    """Clauset–Newman–Moore agglomeration, stopping when no merge raises Q.

    The merge gain of communities i, j is ``(2m*e_ij - d_i*d_j) / (2m^2)``
    where ``e_ij`` counts edges between them and ``d`` is total degree; the
    integer numerator is the heap key, so ties are exact.
    """
    n = u.node_count
    if n == 0:
        raise ValueError("empty graph")
    m = u.edge_count
    two_m = 2 * m
    deg = [len(a) for a in u.adj]
    links: dict[int, dict[int, int]] = {x: {y: 1 for y in u.adj[x]} for x in range(n)}
    heap = []
    for x in range(n):
        for y in u.adj[x]:
            if x < y:
                heap.append((-(two_m - deg[x] * deg[y]), x, y))
    heapq.heapify(heap)
    members: dict[int, list[int]] = {x: [x] for x in range(n)}
    merges = []
    while heap:
        neg, i, j = heapq.heappop(heap)
        row = links.get(i)
        if row is None or j not in row:
            continue
        key = two_m * row[j] - deg[i] * deg[j]
        if key != -neg:
            continue
        if key <= 0:
            break
        merges.append((i, j, key / (2 * m * m)))
        row_j = links.pop(j)
        del row[j]
        for x, c in row_j.items():
            if x == i:
                continue
            row[x] = row.get(x, 0) + c
            other = links[x]
            del other[j]
            other[i] = row[x]
        deg[i] += deg[j]
        members[i].extend(members.pop(j))
        for x, c in row.items():
            a, b = (i, x) if i < x else (x, i)
            heapq.heappush(heap, (-(two_m * c - deg[i] * deg[x]), a, b))
    labels = [0] * n
    for cid, nodes in members.items():
        for x in nodes:
            labels[x] = cid
    canon, count = _canonical_labels(labels)
    return CNMResult(Partition(canon, count, modularity(u, canon)), merges)


@dataclass
class CommunityEntry:
    id: int
    nodes: list[int]
    label: str
    label_share: float
    indivisible: bool
    census: CensusResult

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass
class CommunityReport:
    communities: list[CommunityEntry]
    modularity: float
    algo: str
    parameters: dict

    def to_dict(self) -> dict:
        k = self.parameters["k"]
        table = metrics_table(build_catalog(k))
        out = []
        for c in self.communities:
            total = c.census.total_subgraphs
            census_rows = [
                {"class_id": cid, "count": cnt, "frequency_fraction": round(cnt / total, 4) if total else 0.0}
                for cid, cnt in sorted(c.census.counts.items())
            ]
            rank_rows = [
                {
                    "class_id": mm.class_id,
                    "count": c.census.counts[mm.class_id],
                    "edges": mm.edge_count,
                    "motif_rank": format_ratio(mm.motif_rank),
                    "purchasability": {str(d): format_ratio(f) for d, f, _ in mm.by_in_degree()},
                }
                for mm in table
                if c.census.counts[mm.class_id]
            ]
            out.append(
                {
                    "id": c.id,
                    "size": c.size,
                    "nodes": c.nodes,
                    "label": c.label,
                    "label_share": round(c.label_share, 4),
                    "indivisible": c.indivisible,
                    "census": {"k": k, "total_subgraphs": total, "classes": census_rows},
                    "motif_rank_table": rank_rows,
                }
            )
        return {
            "algo": self.algo,
            "communities": out,
            "modularity": round(self.modularity, 6),
            "parameters": self.parameters,
        }


def _dominant_label(nodes: Sequence[int], meta: Mapping[int, ProductRecord] | None) -> tuple[str, float]:
    groups = Counter()
    for x in nodes:
        rec = meta.get(x) if meta else None
        groups[rec.group if rec is not None and rec.group else UNLABELED] += 1
    label, hits = min(groups.items(), key=lambda kv: (-kv[1], kv[0]))
    return label, hits / len(nodes)


def _split(sub: DirectedGraph, algo: str, gn_node_budget: int) -> list[list[int]] | None:
    """One refinement step of a community; ``None`` when it cannot be split."""
    su = UndirectedView(sub)
    labels = _components([set(a) for a in su.adj])
    if max(labels) > 0:
        groups: dict[int, list[int]] = {}
        for x, c in enumerate(labels):
            groups.setdefault(c, []).append(x)
        return list(groups.values())
    if algo == "girvan-newman" and sub.node_count <= gn_node_budget:
        part = girvan_newman(su, target_communities=2).partition
        if part.count < 2 or part.modularity <= 0:
            return None
    else:
        part = cnm_greedy(su).partition
        if part.count < 2:
            return None
    return part.communities()


def pipeline(
    g: DirectedGraph,
    meta: Mapping[int, ProductRecord] | None = None,
    algo: str = "cnm",
    max_community_size: int = 1000,
    k: int = 3,
    gn_node_budget: int = 2000,
    workers: int | None = 1,
) -> CommunityReport:
    """Split ``g`` until every community fits ``max_community_size``, then census each.

    ``meta`` maps compacted node IDs to product records (see
    :func:`motifscope.ingest.join_metadata`). Girvan–Newman is used only on
    communities of at most ``gn_node_budget`` nodes; larger ones go to CNM.
    A community that no step can split is kept and flagged ``indivisible``.
    """
    if algo in ("gn", "girvan_newman"):
        algo = "girvan-newman"
    if algo not in ("girvan-newman", "cnm"):
        raise ValueError(f"unknown algorithm {algo!r}")
    if max_community_size < k:
        raise ValueError("max_community_size must be at least k")
    pending = deque([list(range(g.node_count))])
    final: list[tuple[list[int], bool]] = []
    while pending:
        nodes = pending.popleft()
        if len(nodes) <= max_community_size:
            final.append((nodes, False))
            continue
        sub = g.induced_subgraph(nodes)
        parts = _split(sub, algo, gn_node_budget)
        if parts is None:
            final.append((nodes, True))
            continue
        for part in parts:
            pending.append(sorted(nodes[x] for x in part))
    final.sort(key=lambda item: item[0][0] if item[0] else -1)

    entries = []
    assignment = [0] * g.node_count
    for cid, (nodes, indivisible) in enumerate(final):
        for x in nodes:
            assignment[x] = cid
        label, share = _dominant_label(nodes, meta)
        entries.append(
            CommunityEntry(
                id=cid,
                nodes=[g.ids[x] for x in nodes],
                label=label,
                label_share=share,
                indivisible=indivisible,
                census=census(g.induced_subgraph(nodes), k, workers=workers),
            )
        )
    q = modularity(UndirectedView(g), assignment)
    params = {"gn_node_budget": gn_node_budget, "k": k, "max_community_size": max_community_size}
    return CommunityReport(entries, q, algo, params)
