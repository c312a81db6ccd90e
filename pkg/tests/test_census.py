import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motifscope.census import census, enumerate_connected_subgraphs, sampled_census
from motifscope.graph import build_from_edges, induced_bitmask, undirected_projection
from motifscope.motifs import build_catalog, legacy_alias_ids
from motifscope.stats import clustering_and_triangles

from conftest import graph_on, random_digraph_edges
from oracles import brute_census, undirected_sets


def reps(k):
    return tuple((c.class_id, tuple(c.canonical_bitmask.edges())) for c in build_catalog(k))


def brute_connected_sets(n, edges, k):
    nb = undirected_sets(n, edges)
    out = set()
    for combo in itertools.combinations(range(n), k):
        seen = {combo[0]}
        stack = [combo[0]]
        members = set(combo)
        while stack:
            x = stack.pop()
            for y in nb[x] & members:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) == k:
            out.add(combo)
    return out


def visited(g, k):
    seen = []
    enumerate_connected_subgraphs(g, k, seen.append)
    return seen


def test_cycle_visited_once(three_cycle):
    assert len(visited(three_cycle, 3)) == 1


def test_out_star_three_triples():
    g = build_from_edges([(0, 1), (0, 2), (0, 3)])
    found = {frozenset(g.ids[x] for x in t) for t in visited(g, 3)}
    assert found == {frozenset({0, 1, 2}), frozenset({0, 1, 3}), frozenset({0, 2, 3})}


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 14), st.floats(0.05, 0.6), st.integers(0, 10**6), st.sampled_from([3, 4]))
def test_enumeration_matches_brute_force(n, p, seed, k):
    edges = random_digraph_edges(n, p, seed)
    g = graph_on(n, edges)
    seen = [tuple(sorted(t)) for t in visited(g, k)]
    assert len(seen) == len(set(seen))
    assert set(seen) == brute_connected_sets(n, edges, k)


def test_converging_pair():
    g = build_from_edges([(0, 2), (1, 2)])
    res = census(g, 3)
    conv = legacy_alias_ids()[4]
    assert build_catalog(3)[conv].in_degree_profile == (0, 0, 2)
    assert res.counts[conv] == 1
    assert sum(res.counts.values()) == 1


def test_cycle_with_pendant():
    # A->B->C->A plus C->D
    g = build_from_edges([(0, 1), (1, 2), (2, 0), (2, 3)])
    res = census(g, 3)
    cat = build_catalog(3)
    by_set = {}
    for t in visited(g, 3):
        by_set[frozenset(t)] = cat.classify(induced_bitmask(g, t))
    assert len(by_set) == 3
    cycle = cat.classify(induced_bitmask(g, (0, 1, 2)))
    chain = cat.classify(induced_bitmask(g, (1, 2, 3)))
    diverging = legacy_alias_ids()[1]
    assert by_set == {frozenset({0, 1, 2}): cycle, frozenset({1, 2, 3}): chain, frozenset({0, 2, 3}): diverging}
    assert cat[cycle].edge_count == 3 and cat[cycle].in_degree_profile == (1, 1, 1)
    assert cat[chain].in_degree_profile == (0, 1, 1)
    expected = {c.class_id: 0 for c in cat}
    expected.update({cycle: 1, chain: 1, diverging: 1})
    assert res.counts == expected
    assert res.counts == brute_census(4, list(g.edges), 3, reps(3)) | {
        c: 0 for c in expected if c not in (cycle, chain, diverging)
    }


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("k", [3, 4])
def test_census_matches_brute_force(seed, k):
    rng = random.Random(seed)
    n = rng.randint(6, 22)
    edges = random_digraph_edges(n, rng.uniform(0.05, 0.35), seed)
    res = census(graph_on(n, edges), k)
    expected = brute_census(n, edges, k, reps(k))
    assert {c: v for c, v in res.counts.items() if v} == expected
    assert res.total_subgraphs == sum(expected.values())


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 40), st.floats(0.02, 0.4), st.integers(0, 10**6))
def test_three_census_identity(n, p, seed):
    g = graph_on(n, random_digraph_edges(n, p, seed))
    cl = clustering_and_triangles(undirected_projection(g))
    assert census(g, 3).total_subgraphs == cl.wedges - 2 * cl.triangles


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 25), st.floats(0.05, 0.4), st.integers(0, 10**6), st.sampled_from([3, 4]))
def test_relabeling_invariance(n, p, seed, k):
    edges = random_digraph_edges(n, p, seed)
    perm = list(range(n))
    random.Random(seed).shuffle(perm)
    a = census(graph_on(n, edges), k)
    b = census(graph_on(n, [(perm[x], perm[y]) for x, y in edges]), k)
    assert a.counts == b.counts


def test_parallel_matches_serial():
    edges = random_digraph_edges(150, 0.04, 7)
    g = graph_on(150, edges)
    for k in (3, 4):
        assert census(g, k, workers=1).counts == census(g, k, workers=3).counts


def test_sampled_all_ones_is_exact():
    g = graph_on(60, random_digraph_edges(60, 0.08, 3))
    exact = census(g, 4)
    s = sampled_census(g, 4, (1, 1, 1, 1), seed=9)
    assert s.counts == exact.counts
    assert s.sampled


def test_sampled_deterministic_across_workers():
    g = graph_on(200, random_digraph_edges(200, 0.05, 11))
    a = sampled_census(g, 3, (1, 0.5, 0.2), seed=5, workers=1)
    b = sampled_census(g, 3, (1, 0.5, 0.2), seed=5, workers=1)
    c = sampled_census(g, 3, (1, 0.5, 0.2), seed=5, workers=3)
    assert a.counts == b.counts == c.counts
    assert a.raw_counts != census(g, 3).counts


@pytest.mark.parametrize("probs", [(1, 0, 1), (1, 1.5, 1), (1, 1)])
def test_sampled_rejects_bad_probs(probs):
    g = build_from_edges([(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        sampled_census(g, 3, probs)


def test_census_rejects_k():
    g = build_from_edges([(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        census(g, 5)


def test_census_on_tiny_graph_is_all_zero():
    g = build_from_edges([(0, 1)])
    res = census(g, 3)
    assert res.total_subgraphs == 0
    assert len(res.counts) == 13
