"""``motifscope`` command line.

Exit status: 0 on success, 1 on usage errors, 2 on unreadable or malformed
data. All outputs are byte-stable for fixed inputs, flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from motifscope import __version__
from motifscope.census import CensusResult, census, sampled_census
from motifscope.community import cnm_greedy, girvan_newman, pipeline
from motifscope.errors import MotifscopeError
from motifscope.graph import UndirectedView
from motifscope.ingest import join_metadata, load_metadata, read_graph
from motifscope.metrics import format_ratio, metrics_table
from motifscope.motifs import build_catalog
from motifscope.nullmodel import significance
from motifscope.stats import summarize

log = logging.getLogger("motifscope")

CENSUS_HEADER = ["class_id", "k", "edges", "count", "frequency_fraction"]
CATALOG_HEADER = ["class_id", "k", "edges", "canonical_bitmask", "in_degree_profile", "example_edge_list"]
METRICS_HEADER = ["class_id", "k", "edges", "in_degree", "f_value", "motif_rank"]
SIGNIFICANCE_HEADER = ["class_id", "real_count", "mean", "stddev", "z", "profile_component"]


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    edges: Path | None = None
    meta: Path | None = None
    k: int = 3
    seed: int = 42
    ensembles: int = 100
    swaps_per_edge: int = 10
    sample: tuple[float, ...] | None = None
    algo: str = "cnm"
    max_community_size: int = 1000
    out: str = "csv"
    output: str | None = None
    threads: int | None = None

    def validate(self) -> None:
        if self.k not in (3, 4):
            raise UsageError(f"--k must be 3 or 4, got {self.k}")
        if self.sample is not None:
            if len(self.sample) != self.k:
                raise UsageError(f"--sample needs {self.k} probabilities")
            if any(not 0 < p <= 1 for p in self.sample):
                raise UsageError("--sample probabilities must lie in (0, 1]")
        for path in (self.edges, self.meta):
            if path is not None and not path.is_file():
                raise DataError(f"no such file: {path}")


def _fmt(x: Any) -> str:
    """Fixed formatting: ints verbatim, reals to 4 places, None empty."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return "nan" if x != x else f"{x:.4f}"
    return str(x)


def _json_ready(obj: Any) -> Any:
    if isinstance(obj, float):
        return round(obj, 4)
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _write(text: str, path: str | None) -> int:
    data = text.encode("utf-8")
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        try:
            Path(path).write_bytes(data)
        except OSError as exc:
            raise DataError(f"cannot write {path}: {exc.strerror}") from None
    return len(data)


def emit_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: str | None) -> int:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return _write(buf.getvalue(), path)


def emit_json(obj: Any, path: str | None) -> int:
    return _write(json.dumps(_json_ready(obj), sort_keys=True, indent=2) + "\n", path)


def emit(result: Any, fmt: str, path: str | None, header: Sequence[str] | None = None) -> int:
    """Write ``result`` as CSV (``header`` plus row sequences) or JSON."""
    if fmt == "csv":
        if header is None:
            raise ValueError("csv output needs a header")
        return emit_csv(header, result, path)
    if fmt == "json":
        return emit_json(result, path)
    raise ValueError(f"unknown format {fmt!r}")


def census_rows(result: CensusResult) -> list[list[Any]]:
    catalog = build_catalog(result.k)
    return [
        [cid, result.k, catalog[cid].edge_count, cnt, result.frequency(cid)]
        for cid, cnt in sorted(result.counts.items())
    ]


def _census_json(result: CensusResult) -> dict:
    return {
        "k": result.k,
        "sampled": result.sampled,
        "sampling_probabilities": list(result.sampling_probabilities or []),
        "total_subgraphs": result.total_subgraphs,
        "classes": [dict(zip(CENSUS_HEADER, row)) for row in census_rows(result)],
    }


def _load_graph(path: Path):
    g = read_graph(path)
    if g.dropped_self_loops or g.dropped_duplicates:
        log.info("dropped %d self-loops and %d duplicate edges", g.dropped_self_loops, g.dropped_duplicates)
    return g


def cmd_stats(cfg: RunConfig, args: argparse.Namespace) -> None:
    g = _load_graph(cfg.edges)
    s = summarize(
        g,
        sample_sources=args.sample_sources,
        seed=cfg.seed,
        diameter=args.diameter,
        diameter_budget=args.diameter_budget,
    )
    rows = s.rows()
    width = max(len(label) for label, _ in rows)
    _write("".join(f"{label:<{width}}  {value}\n" for label, value in rows), None)
    if args.json:
        emit_json(s.to_dict(), args.json)


def cmd_catalog(cfg: RunConfig, args: argparse.Namespace) -> None:
    rows = []
    for c in build_catalog(cfg.k):
        rows.append(
            [
                c.class_id,
                c.k,
                c.edge_count,
                f"0x{c.canonical_bitmask.bits:03x}",
                " ".join(map(str, c.in_degree_profile)),
                " ".join(f"{i}>{j}" for i, j in c.canonical_bitmask.edges()),
            ]
        )
    if cfg.out == "json":
        emit_json([dict(zip(CATALOG_HEADER, r)) for r in rows], cfg.output)
    else:
        emit_csv(CATALOG_HEADER, rows, cfg.output)


def cmd_census(cfg: RunConfig, args: argparse.Namespace) -> None:
    g = _load_graph(cfg.edges)
    if cfg.sample is not None:
        result = sampled_census(g, cfg.k, cfg.sample, seed=cfg.seed, workers=cfg.threads)
    else:
        result = census(g, cfg.k, workers=cfg.threads)
    if cfg.out == "json":
        emit_json(_census_json(result), cfg.output)
    else:
        # no connected k-set at all: header only, rather than a column of zeros
        emit_csv(CENSUS_HEADER, census_rows(result) if result.total_subgraphs else [], cfg.output)
    if args.hist:
        emit_csv(["class_id", "count"], sorted(result.counts.items()), args.hist)


def metrics_rows(k: int) -> list[list[Any]]:
    rows = []
    for mm in metrics_table(build_catalog(k)):
        for indeg, f, _mult in mm.by_in_degree():
            rows.append([mm.class_id, mm.k, mm.edge_count, indeg, format_ratio(f), format_ratio(mm.motif_rank)])
    return rows


def cmd_metrics(cfg: RunConfig, args: argparse.Namespace) -> None:
    if cfg.out == "json":
        table = [
            {
                "class_id": mm.class_id,
                "k": mm.k,
                "edges": mm.edge_count,
                "motif_rank": format_ratio(mm.motif_rank),
                "purchasability": [None if f is None else format_ratio(f) for f in mm.purchasability],
            }
            for mm in metrics_table(build_catalog(cfg.k))
        ]
        emit_json(table, cfg.output)
    else:
        emit_csv(METRICS_HEADER, metrics_rows(cfg.k), cfg.output)


def cmd_significance(cfg: RunConfig, args: argparse.Namespace) -> None:
    g = _load_graph(cfg.edges)
    report = significance(
        g, cfg.k, ensembles=cfg.ensembles, swaps_per_edge=cfg.swaps_per_edge,
        seed=cfg.seed, probs=cfg.sample, workers=cfg.threads,
    )
    rows = [[c.class_id, c.real_count, c.mean, c.stddev, c.z, c.profile] for c in report.classes]
    if cfg.out == "json":
        emit_json(
            {
                "k": report.k,
                "ensembles": report.ensembles,
                "swaps_per_edge": report.swaps_per_edge,
                "seed": report.seed,
                "classes": [dict(zip(SIGNIFICANCE_HEADER, r), degenerate=c.degenerate) for r, c in zip(rows, report.classes)],
            },
            cfg.output,
        )
    else:
        emit_csv(SIGNIFICANCE_HEADER, rows, cfg.output)


def cmd_communities(cfg: RunConfig, args: argparse.Namespace) -> None:
    g = _load_graph(cfg.edges)
    u = UndirectedView(g)
    if cfg.algo == "gn":
        part = girvan_newman(u, args.target).partition
    else:
        part = cnm_greedy(u).partition
    if cfg.out == "json":
        emit_json(
            {
                "algo": cfg.algo,
                "modularity": part.modularity,
                "communities": [
                    {"id": cid, "size": len(nodes), "nodes": [g.ids[x] for x in nodes]}
                    for cid, nodes in enumerate(part.communities())
                ],
            },
            cfg.output,
        )
    else:
        emit_csv(["node_id", "community"], ([g.ids[x], c] for x, c in enumerate(part.assignment)), cfg.output)


def cmd_pipeline(cfg: RunConfig, args: argparse.Namespace) -> None:
    g = _load_graph(cfg.edges)
    meta = None
    if cfg.meta is not None:
        meta, unmatched = join_metadata(g, load_metadata(cfg.meta))
        if unmatched:
            log.info("%d metadata records match no graph node", len(unmatched))
    report = pipeline(
        g, meta, algo=cfg.algo, max_community_size=cfg.max_community_size, k=cfg.k,
        gn_node_budget=args.gn_budget, workers=cfg.threads,
    )
    emit_json(report.to_dict(), cfg.output)


def _probabilities(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad probability list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="motifscope", description="Directed motif analysis of co-purchasing networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def edges_arg(p):
        p.add_argument("edges", type=Path, help="SNAP edge list (optionally .gz)")

    def k_arg(p, required=True):
        p.add_argument("--k", type=int, choices=(3, 4), required=required, default=3, help="motif order")

    def out_args(p, choices=("csv", "json")):
        p.add_argument("--out", choices=choices, default=choices[0], help="output format")
        p.add_argument("--output", "-o", default=None, help="output file (default stdout)")

    def threads_arg(p):
        p.add_argument("--threads", type=int, default=None, help="worker processes (default $MOTIFSCOPE_THREADS or all cores)")

    p = sub.add_parser("stats", help="global statistics table")
    edges_arg(p)
    p.add_argument("--sample-sources", type=int, default=1000, help="BFS sources for the effective diameter")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--diameter", action="store_true", help="also compute the exact diameter (slow on large graphs)")
    p.add_argument("--diameter-budget", type=float, default=None, help="seconds before the diameter becomes a lower bound")
    p.add_argument("--json", default=None, help="also write the summary as JSON to this path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("catalog", help="dump the motif class catalog")
    k_arg(p)
    out_args(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("census", help="count connected induced k-subgraphs per class")
    edges_arg(p)
    k_arg(p)
    p.add_argument("--sample", type=_probabilities, default=None, help="RAND-ESU depth probabilities p1,..,pk")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--hist", default=None, help="write class_id,count frequency data to this path")
    out_args(p)
    threads_arg(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("metrics", help="purchasability and Motif Rank per class")
    k_arg(p)
    out_args(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("significance", help="z-scores against degree-preserving rewiring")
    edges_arg(p)
    k_arg(p)
    p.add_argument("--ensembles", type=int, default=100)
    p.add_argument("--swaps-per-edge", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sample", type=_probabilities, default=None, help="census depth probabilities for real and random graphs")
    out_args(p)
    threads_arg(p)
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("communities", help="community detection on the undirected projection")
    edges_arg(p)
    p.add_argument("--algo", choices=("gn", "cnm"), default="cnm")
    p.add_argument("--target", type=int, default=None, help="GN: stop at this many communities")
    out_args(p)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("pipeline", help="split into communities, then census each")
    edges_arg(p)
    p.add_argument("--meta", type=Path, default=None, help="amazon-meta product file for labels")
    p.add_argument("--algo", choices=("gn", "cnm"), default="cnm")
    p.add_argument("--max-size", type=int, default=1000, help="largest community left unsplit")
    k_arg(p, required=False)
    p.add_argument("--gn-budget", type=int, default=2000, help="largest community GN is run on; CNM above")
    p.add_argument("--output", "-o", default=None, help="JSON report path (default stdout)")
    threads_arg(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        edges=getattr(args, "edges", None),
        meta=getattr(args, "meta", None),
        k=getattr(args, "k", 3),
        seed=getattr(args, "seed", 42),
        ensembles=getattr(args, "ensembles", 100),
        swaps_per_edge=getattr(args, "swaps_per_edge", 10),
        sample=getattr(args, "sample", None),
        algo=getattr(args, "algo", "cnm"),
        max_community_size=getattr(args, "max_size", 1000),
        out=getattr(args, "out", "json"),
        output=getattr(args, "output", None),
        threads=getattr(args, "threads", None),
    )


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    cfg = _config(args)
    try:
        cfg.validate()
        if cfg.subcommand == "significance" and cfg.ensembles < 2:
            raise UsageError("--ensembles must be at least 2")
        if cfg.subcommand == "pipeline" and cfg.max_community_size < cfg.k:
            raise UsageError("--max-size must be at least --k")
        args.func(cfg, args)
    except UsageError as exc:
        print(f"motifscope: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, MotifscopeError, OSError) as exc:
        print(f"motifscope: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
