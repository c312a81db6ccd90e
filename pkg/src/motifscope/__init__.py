"""Directed motif analysis for product co-purchasing networks."""

__version__ = "0.1.0"

from motifscope.census import CensusResult, census, enumerate_connected_subgraphs, sampled_census
from motifscope.community import cnm_greedy, girvan_newman, pipeline
from motifscope.graph import (
    AdjacencyBitmask,
    DirectedGraph,
    UndirectedView,
    build_from_edges,
    induced_bitmask,
    undirected_projection,
)
from motifscope.ingest import load_metadata, read_graph
from motifscope.metrics import metrics_table, motif_rank, purchasability
from motifscope.motifs import MotifCatalog, MotifClass, build_catalog, canonical_form
from motifscope.nullmodel import significance
from motifscope.stats import summarize

__all__ = [
    "AdjacencyBitmask",
    "CensusResult",
    "DirectedGraph",
    "MotifCatalog",
    "MotifClass",
    "UndirectedView",
    "build_catalog",
    "build_from_edges",
    "canonical_form",
    "census",
    "cnm_greedy",
    "enumerate_connected_subgraphs",
    "girvan_newman",
    "induced_bitmask",
    "load_metadata",
    "metrics_table",
    "motif_rank",
    "pipeline",
    "purchasability",
    "read_graph",
    "sampled_census",
    "significance",
    "summarize",
    "undirected_projection",
]
