"""Immutable directed graph with compacted node IDs.

Nodes are renumbered ``0..n-1`` in order of first appearance; the original
(external) IDs are kept in ``DirectedGraph.ids``. Adjacency lists are sorted
tuples so edge queries can use binary search.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from motifscope.errors import GraphError

__all__ = [
    "AdjacencyBitmask",
    "DirectedGraph",
    "UndirectedView",
    "build_from_edges",
    "induced_bitmask",
    "pair_bit",
    "undirected_projection",
]


def pair_bit(i: int, j: int, k: int) -> int:
    """Bit position of the ordered pair ``(i, j)`` in a k-node bitmask.

    Row-major over ``i`` with the diagonal skipped, so a k-node bitmask uses
    exactly ``k * (k - 1)`` bits.
    """
    if i == j:
        raise ValueError("diagonal pair has no bit")
    return i * (k - 1) + (j if j < i else j - 1)


class AdjacencyBitmask(NamedTuple):
    """Adjacency of a k-node digraph packed into ``k*(k-1)`` bits."""

    k: int
    bits: int

    @classmethod
    def from_edges(cls, k: int, edges: Iterable[tuple[int, int]]) -> "AdjacencyBitmask":
        bits = 0
        for i, j in edges:
            bits |= 1 << pair_bit(i, j, k)
        return cls(k, bits)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.bits >> pair_bit(i, j, self.k) & 1)

    def edges(self) -> list[tuple[int, int]]:
        k = self.k
        return [(i, j) for i in range(k) for j in range(k) if i != j and self.has_edge(i, j)]

    @property
    def edge_count(self) -> int:
        return self.bits.bit_count()

    def in_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.k
        for _, j in self.edges():
            deg[j] += 1
        return tuple(deg)

    def out_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.k
        for i, _ in self.edges():
            deg[i] += 1
        return tuple(deg)

    def permuted(self, perm: Sequence[int]) -> "AdjacencyBitmask":
        """Relabel position ``i`` as ``perm[i]``."""
        return AdjacencyBitmask.from_edges(self.k, ((perm[i], perm[j]) for i, j in self.edges()))


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Simple digraph over compacted IDs ``0..node_count-1``.

    Attributes:
        node_count: Number of nodes.
        out_adj: Sorted out-neighbour tuple per node.
        in_adj: Sorted in-neighbour tuple per node.
        ids: Original external ID of each compacted node.
        dropped_self_loops: Self-loops discarded at build time.
        dropped_duplicates: Repeated directed edges discarded at build time.
    """

    node_count: int
    out_adj: tuple[tuple[int, ...], ...]
    in_adj: tuple[tuple[int, ...], ...]
    ids: tuple[int, ...]
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0
    edge_count: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge_count", sum(map(len, self.out_adj)))

    @classmethod
    def from_adjacency(
        cls,
        out_lists: Sequence[Iterable[int]],
        ids: Sequence[int] | None = None,
    ) -> "DirectedGraph":
        """Build from per-node out-neighbour collections over compacted IDs.

        Self-loops and duplicates are dropped silently; use
        :func:`build_from_edges` when the counts matter.
        """
        n = len(out_lists)
        out_adj = tuple(tuple(sorted({v for v in nbrs if v != u})) for u, nbrs in enumerate(out_lists))
        in_lists: list[list[int]] = [[] for _ in range(n)]
        for u, nbrs in enumerate(out_adj):
            for v in nbrs:
                in_lists[v].append(u)
        # u ascends, so every in-list is already sorted
        in_adj = tuple(map(tuple, in_lists))
        if ids is None:
            ids = range(n)
        ids = tuple(ids)
        if len(ids) != n:
            raise GraphError("ids must cover every node")
        return cls(n, out_adj, in_adj, ids)

    @cached_property
    def index(self) -> dict[int, int]:
        """Original ID -> compacted ID."""
        return {orig: i for i, orig in enumerate(self.ids)}

    @property
    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.out_adj):
            for v in nbrs:
                yield u, v

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.out_adj[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def out_degree(self, u: int) -> int:
        return len(self.out_adj[u])

    def in_degree(self, u: int) -> int:
        return len(self.in_adj[u])

    def degree_vectors(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """``(in_degrees, out_degrees)`` indexed by compacted node."""
        return tuple(map(len, self.in_adj)), tuple(map(len, self.out_adj))

    def induced_subgraph(self, nodes: Iterable[int]) -> "DirectedGraph":
        """Subgraph induced by compacted ``nodes``; keeps original IDs.

        New compacted IDs follow ascending order of the old ones.
        """
        keep = sorted(set(nodes))
        remap = {old: new for new, old in enumerate(keep)}
        out_lists = [[remap[v] for v in self.out_adj[u] if v in remap] for u in keep]
        return DirectedGraph.from_adjacency(out_lists, [self.ids[u] for u in keep])

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Out-adjacency as ``(indptr, indices)`` arrays."""
        return _to_csr(self.out_adj)

    def __repr__(self) -> str:
        return f"DirectedGraph(nodes={self.node_count}, edges={self.edge_count})"


def _to_csr(adj: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.fromiter((len(a) for a in adj), dtype=np.int64, count=len(adj))
    indptr = np.zeros(len(adj) + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    indices = np.fromiter((v for a in adj for v in a), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


def build_from_edges(pairs: Iterable[tuple[int, int]]) -> DirectedGraph:
    """Build a compacted simple digraph from ``(from, to)`` pairs of original IDs.

    Compacted IDs follow first appearance in ``pairs``. Self-loops and
    duplicate edges are dropped and counted on the result.
    """
    index: dict[int, int] = {}
    ids: list[int] = []
    out_sets: list[set[int]] = []
    self_loops = duplicates = 0
    seen_any = False
    for a, b in pairs:
        seen_any = True
        if a < 0 or b < 0:
            raise GraphError(f"negative node id in pair ({a}, {b})")
        for x in (a, b):
            if x not in index:
                index[x] = len(ids)
                ids.append(x)
                out_sets.append(set())
        if a == b:
            self_loops += 1
            continue
        targets = out_sets[index[a]]
        v = index[b]
        if v in targets:
            duplicates += 1
        else:
            targets.add(v)
    if not seen_any:
        raise GraphError("empty edge list")
    g = DirectedGraph.from_adjacency(out_sets, ids)
    object.__setattr__(g, "dropped_self_loops", self_loops)
    object.__setattr__(g, "dropped_duplicates", duplicates)
    return g


class UndirectedView:
    """Symmetric projection of a :class:`DirectedGraph`.

    ``adj[u]`` is the sorted union of in- and out-neighbours of ``u``.
    """

    __slots__ = ("graph", "adj", "edge_count", "__dict__")

    def __init__(self, graph: DirectedGraph) -> None:
        self.graph = graph
        adj = []
        for outs, ins in zip(graph.out_adj, graph.in_adj):
            if not ins:
                adj.append(outs)
            elif not outs:
                adj.append(ins)
            else:
                adj.append(tuple(sorted(set(outs).union(ins))))
        self.adj: tuple[tuple[int, ...], ...] = tuple(adj)
        self.edge_count: int = sum(map(len, self.adj)) // 2

    @property
    def node_count(self) -> int:
        return len(self.adj)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``."""
        for u, nbrs in enumerate(self.adj):
            for v in nbrs[bisect_left(nbrs, u + 1):]:
                yield u, v

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adj[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _to_csr(self.adj)

    def __repr__(self) -> str:
        return f"UndirectedView(nodes={self.node_count}, edges={self.edge_count})"


def undirected_projection(g: DirectedGraph) -> UndirectedView:
    return UndirectedView(g)


def induced_bitmask(g: DirectedGraph, nodes: Sequence[int]) -> AdjacencyBitmask:
    """Adjacency bitmask of the subgraph induced by the ordered ``nodes``."""
    k = len(nodes)
    if not 3 <= k <= 4:
        raise ValueError(f"subgraph order must be 3 or 4, got {k}")
    if len(set(nodes)) != k:
        raise ValueError(f"duplicate node in {tuple(nodes)}")
    bits = 0
    for i, u in enumerate(nodes):
        for j, v in enumerate(nodes):
            if i != j and g.has_edge(u, v):
                bits |= 1 << pair_bit(i, j, k)
    return AdjacencyBitmask(k, bits)
