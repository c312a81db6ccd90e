"""Degree-preserving rewiring and motif z-scores."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from motifscope._parallel import process_pool, resolve_workers
from motifscope.census import CensusResult, census, sampled_census
from motifscope.graph import DirectedGraph

__all__ = [
    "ClassSignificance",
    "RewireStats",
    "SignificanceReport",
    "ensemble_seed",
    "rewire",
    "rewire_with_stats",
    "significance",
    "swap_edges",
]


@dataclass
class RewireStats:
    attempts: int
    swaps: int


def swap_edges(
    edges: list[tuple[int, int]], edge_set: set[tuple[int, int]], i: int, j: int
) -> bool:
    """Try to replace ``(a,b),(c,d)`` at ``i, j`` by ``(a,d),(c,b)`` in place.

    Refused when it would create a self-loop or a duplicate edge.
    """
    a, b = edges[i]
    c, d = edges[j]
    if a == d or c == b or (a, d) in edge_set or (c, b) in edge_set:
        return False
    edge_set.discard((a, b))
    edge_set.discard((c, d))
    edge_set.add((a, d))
    edge_set.add((c, b))
    edges[i] = (a, d)
    edges[j] = (c, b)
    return True


def rewire_with_stats(
    g: DirectedGraph, swaps_per_edge: int = 10, seed: int = 42
) -> tuple[DirectedGraph, RewireStats]:
    if swaps_per_edge < 1:
        raise ValueError("swaps_per_edge must be >= 1")
    edges = list(g.edges)
    m = len(edges)
    if m < 2:
        return g, RewireStats(0, 0)
    edge_set = set(edges)
    rng = random.Random(seed)
    attempts = swaps_per_edge * m
    swaps = 0
    randrange = rng.randrange
    for _ in range(attempts):
        i = randrange(m)
        j = randrange(m - 1)
        if j >= i:
            j += 1
        if swap_edges(edges, edge_set, i, j):
            swaps += 1
    out_lists: list[list[int]] = [[] for _ in range(g.node_count)]
    for a, b in edges:
        out_lists[a].append(b)
    return DirectedGraph.from_adjacency(out_lists, g.ids), RewireStats(attempts, swaps)


def rewire(g: DirectedGraph, swaps_per_edge: int = 10, seed: int = 42) -> DirectedGraph:
    """Randomise ``g`` keeping every node's in- and out-degree."""
    return rewire_with_stats(g, swaps_per_edge, seed)[0]


def ensemble_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


@dataclass
class ClassSignificance:
    class_id: int
    real_count: float
    mean: float
    stddev: float
    z: float | None
    profile: float | None

    @property
    def degenerate(self) -> bool:
        """Zero spread with the real count off the mean: no finite z exists."""
        return self.stddev == 0 and self.real_count != self.mean


@dataclass
class SignificanceReport:
    k: int
    classes: list[ClassSignificance]
    ensembles: int
    swaps_per_edge: int
    seed: int
    sampling_probabilities: tuple[float, ...] | None = None


def _census(g: DirectedGraph, k: int, probs, seed: int) -> CensusResult:
    if probs is None:
        return census(g, k, workers=1)
    return sampled_census(g, k, probs, seed=seed, workers=1)


_ENSEMBLE: dict = {}


def _init_ensemble(g, k, swaps_per_edge, seed, probs) -> None:
    _ENSEMBLE.update(g=g, k=k, swaps=swaps_per_edge, seed=seed, probs=probs)


def _ensemble_member(index: int) -> list[float]:
    st = _ENSEMBLE
    s = ensemble_seed(st["seed"], index)
    r = rewire(st["g"], st["swaps"], s)
    return _census(r, st["k"], st["probs"], s).vector()


def significance(
    g: DirectedGraph,
    k: int,
    ensembles: int = 100,
    swaps_per_edge: int = 10,
    seed: int = 42,
    probs: Sequence[float] | None = None,
    workers: int | None = 1,
) -> SignificanceReport:
    """Compare the real census with ``ensembles`` rewired graphs.

    Member ``i`` uses seed ``ensemble_seed(seed, i)`` for both rewiring and,
    when ``probs`` is given, census sampling. Stddev is the sample (n-1)
    standard deviation. With zero spread, z is 0 when the real count equals
    the ensemble mean and omitted otherwise.
    """
    if ensembles < 2:
        raise ValueError("ensembles must be >= 2")
    probs = tuple(probs) if probs is not None else None
    real = _census(g, k, probs, seed)
    workers = resolve_workers(workers)
    if workers == 1:
        _init_ensemble(g, k, swaps_per_edge, seed, probs)
        try:
            vectors = [_ensemble_member(i) for i in range(ensembles)]
        finally:
            _ENSEMBLE.clear()
    else:
        with process_pool(workers, _init_ensemble, (g, k, swaps_per_edge, seed, probs)) as pool:
            vectors = list(pool.map(_ensemble_member, range(ensembles)))

    class_ids = sorted(real.counts)
    rows = []
    for col, cid in enumerate(class_ids):
        samples = [v[col] for v in vectors]
        mean = math.fsum(samples) / ensembles
        var = math.fsum((x - mean) ** 2 for x in samples) / (ensembles - 1)
        sd = math.sqrt(var)
        r = real.counts[cid]
        if sd > 0:
            z = (r - mean) / sd
        else:
            z = 0.0 if r == mean else None
        rows.append(ClassSignificance(cid, r, mean, sd, z, None))
    norm = math.sqrt(math.fsum(row.z**2 for row in rows if row.z is not None))
    for row in rows:
        if row.z is not None:
            row.profile = row.z / norm if norm > 0 else 0.0
    return SignificanceReport(k, rows, ensembles, swaps_per_edge, seed, probs)
