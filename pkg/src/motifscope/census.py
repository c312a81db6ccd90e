"""ESU enumeration of connected induced k-subgraphs and motif census.

Connectivity is judged on the undirected projection; classification uses the
directed edges among the chosen nodes. Work is split across processes by
root vertex, and per-worker count vectors are summed, so exact results do not
depend on the worker count. Sampled runs (RAND-ESU) draw from one RNG per
root, seeded from ``(seed, root)``, for the same reason.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from math import prod
from typing import Callable, Iterator, Sequence

from motifscope._parallel import process_pool, resolve_workers
from motifscope.graph import DirectedGraph, UndirectedView, pair_bit
from motifscope.motifs import MotifCatalog, build_catalog

__all__ = [
    "CensusResult",
    "EnumerationStats",
    "census",
    "enumerate_connected_subgraphs",
    "esu",
    "resolve_workers",
    "sampled_census",
]


def _esu_root(
    adj: Sequence[Sequence[int]],
    v: int,
    k: int,
    probs: Sequence[float] | None = None,
    rng: random.Random | None = None,
) -> Iterator[tuple[int, ...]]:
    """All connected k-sets whose smallest node is ``v``, each exactly once."""
    nv = adj[v]
    closed = set(nv)
    closed.add(v)
    ext = [u for u in nv if u > v]
    if probs is None:
        if k == 3:
            for i, w in enumerate(ext):
                for x in ext[i + 1 :]:
                    yield (v, w, x)
                for x in adj[w]:
                    if x > v and x not in closed:
                        yield (v, w, x)
        else:
            yield from _extend(adj, v, (v,), ext, closed, k)
    elif probs[0] >= 1.0 or rng.random() < probs[0]:
        yield from _extend_sampled(adj, v, (v,), ext, closed, k, probs, rng)


def _extend(adj, v, sub, ext, closed, k):
    if len(sub) == k - 1:
        for w in ext:
            yield (*sub, w)
        return
    for i, w in enumerate(ext):
        new_ext = ext[i + 1 :]
        new_ext.extend(u for u in adj[w] if u > v and u not in closed)
        yield from _extend(adj, v, (*sub, w), new_ext, closed.union(adj[w]), k)


def _extend_sampled(adj, v, sub, ext, closed, k, probs, rng):
    p = probs[len(sub)]
    if len(sub) == k - 1:
        for w in ext:
            if p >= 1.0 or rng.random() < p:
                yield (*sub, w)
        return
    for i, w in enumerate(ext):
        if p < 1.0 and rng.random() >= p:
            continue
        new_ext = ext[i + 1 :]
        new_ext.extend(u for u in adj[w] if u > v and u not in closed)
        yield from _extend_sampled(adj, v, (*sub, w), new_ext, closed.union(adj[w]), k, probs, rng)


def _root_rng(seed: int, root: int) -> random.Random:
    return random.Random(f"{seed}:{root}")


def esu(
    adj: Sequence[Sequence[int]],
    k: int,
    roots: Sequence[int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Iterate every connected induced k-set of an undirected adjacency."""
    if k < 2:
        raise ValueError("k must be at least 2")
    for v in range(len(adj)) if roots is None else roots:
        yield from _esu_root(adj, v, k)


@dataclass
class EnumerationStats:
    subgraphs: int
    roots: int
    elapsed: float


def enumerate_connected_subgraphs(
    g: DirectedGraph | UndirectedView,
    k: int,
    visitor: Callable[[tuple[int, ...]], object] | None = None,
) -> EnumerationStats:
    """Call ``visitor`` once per connected induced k-node set (single process)."""
    if k not in (3, 4):
        raise ValueError(f"k must be 3 or 4, got {k}")
    u = g if isinstance(g, UndirectedView) else UndirectedView(g)
    start = time.perf_counter()
    n = 0
    for nodes in esu(u.adj, k):
        n += 1
        if visitor is not None:
            visitor(nodes)
    return EnumerationStats(n, u.node_count, time.perf_counter() - start)


@dataclass
class CensusResult:
    """Per-class subgraph counts for one motif order.

    ``counts`` holds every class ID of the catalog, zeros included. In sampled
    mode the counts are unbiased estimates (raw hits divided by the product of
    the depth probabilities) and ``raw_counts`` keeps the hits.
    """

    k: int
    counts: dict[int, int | float]
    total_subgraphs: int | float
    elapsed: float = 0.0
    sampled: bool = False
    sampling_probabilities: tuple[float, ...] | None = None
    raw_counts: dict[int, int] | None = field(default=None, repr=False)

    def vector(self) -> list[int | float]:
        return [self.counts[c] for c in sorted(self.counts)]

    def frequency(self, class_id: int) -> float:
        return self.counts[class_id] / self.total_subgraphs if self.total_subgraphs else 0.0

    def top(self, n: int) -> list[int]:
        """Class IDs of the ``n`` largest counts (ties by class ID)."""
        return sorted(self.counts, key=lambda c: (-self.counts[c], c))[:n]


# worker-process state, installed by _init_worker
_STATE: dict = {}


def _init_worker(g: DirectedGraph, k: int, probs, seed) -> None:
    _STATE.clear()
    _STATE.update(
        adj=UndirectedView(g).adj,
        out_sets=[set(nbrs) for nbrs in g.out_adj],
        table=build_catalog(k).table,
        k=k,
        probs=probs,
        seed=seed,
    )


def _count_roots(roots: Sequence[int]) -> list[int]:
    adj = _STATE["adj"]
    out_sets = _STATE["out_sets"]
    table = _STATE["table"]
    k = _STATE["k"]
    probs = _STATE["probs"]
    seed = _STATE["seed"]
    counts = [0] * (max(table) + 1)
    pairs = [(i, j, 1 << pair_bit(i, j, k)) for i in range(k) for j in range(k) if i != j]
    for v in roots:
        rng = _root_rng(seed, v) if probs is not None else None
        for nodes in _esu_root(adj, v, k, probs, rng):
            bits = 0
            for i, j, bit in pairs:
                if nodes[j] in out_sets[nodes[i]]:
                    bits |= bit
            counts[table[bits]] += 1
    return counts


def _run(g: DirectedGraph, k: int, probs, seed, workers: int | None) -> list[int]:
    workers = resolve_workers(workers)
    n = g.node_count
    if workers == 1 or n < 64:
        _init_worker(g, k, probs, seed)
        try:
            return _count_roots(range(n))
        finally:
            _STATE.clear()
    # strided chunks balance hubs, which cluster at low compacted IDs
    n_chunks = workers * 8
    chunks = [range(i, n, n_chunks) for i in range(n_chunks)]
    total = None
    with process_pool(workers, _init_worker, (g, k, probs, seed)) as pool:
        for part in pool.map(_count_roots, chunks):
            total = part if total is None else [a + b for a, b in zip(total, part)]
    return total


def _result(k, raw, elapsed, probs) -> CensusResult:
    catalog: MotifCatalog = build_catalog(k)
    hits = {c.class_id: raw[c.class_id] for c in catalog}
    if probs is None or all(p == 1.0 for p in probs):
        return CensusResult(
            k, hits, sum(hits.values()), elapsed,
            sampled=probs is not None,
            sampling_probabilities=tuple(probs) if probs is not None else None,
            raw_counts=dict(hits) if probs is not None else None,
        )
    scale = 1.0 / prod(probs)
    estimates = {c: h * scale for c, h in hits.items()}
    return CensusResult(
        k, estimates, sum(hits.values()) * scale, elapsed,
        sampled=True, sampling_probabilities=tuple(probs), raw_counts=hits,
    )


def census(g: DirectedGraph, k: int, workers: int | None = 1) -> CensusResult:
    """Exact count of connected induced k-subgraphs per motif class."""
    if k not in (3, 4):
        raise ValueError(f"k must be 3 or 4, got {k}")
    start = time.perf_counter()
    raw = _run(g, k, None, None, workers)
    return _result(k, raw, time.perf_counter() - start, None)


def sampled_census(
    g: DirectedGraph,
    k: int,
    probs: Sequence[float],
    seed: int = 42,
    workers: int | None = 1,
) -> CensusResult:
    """RAND-ESU estimate of the census.

    ``probs[d]`` is the chance of following each branch that adds the
    ``d``-th node (``probs[0]`` selects roots). Every k-set is then kept with
    probability ``prod(probs)``.
    """
    if k not in (3, 4):
        raise ValueError(f"k must be 3 or 4, got {k}")
    probs = tuple(float(p) for p in probs)
    if len(probs) != k:
        raise ValueError(f"need {k} sampling probabilities, got {len(probs)}")
    if any(not 0.0 < p <= 1.0 for p in probs):
        raise ValueError(f"sampling probabilities must lie in (0, 1], got {probs}")
    start = time.perf_counter()
    raw = _run(g, k, probs, seed, workers)
    return _result(k, raw, time.perf_counter() - start, probs)
