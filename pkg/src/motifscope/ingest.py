"""Readers for the SNAP edge list and the amazon-meta product file."""

from __future__ import annotations

import gzip
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from motifscope.errors import ParseError
from motifscope.graph import DirectedGraph, build_from_edges

__all__ = [
    "ProductRecord",
    "Review",
    "category_path",
    "join_metadata",
    "load_edge_list",
    "load_metadata",
    "open_text",
    "parse_edge_list",
    "parse_metadata",
    "read_graph",
    "write_metadata",
]


def open_text(path: str | Path) -> IO[str]:
    """Open a text file, transparently decompressing ``.gz``."""
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline=None)
    return open(path, encoding="utf-8", newline=None)


def parse_edge_list(stream: Iterable[str]) -> list[tuple[int, int]]:
    """Parse ``FromNodeId<ws>ToNodeId`` lines; ``#`` lines are comments."""
    pairs = []
    append = pairs.append
    for lineno, line in enumerate(stream, 1):
        if line.startswith("#"):
            continue
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 2 integers, got {len(parts)} tokens", f"line {lineno}")
        try:
            append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"non-integer token in {line.strip()!r}", f"line {lineno}") from None
    return pairs


def load_edge_list(path: str | Path) -> list[tuple[int, int]]:
    with open_text(path) as fh:
        return parse_edge_list(fh)


def read_graph(path: str | Path) -> DirectedGraph:
    return build_from_edges(load_edge_list(path))


@dataclass(frozen=True)
class Review:
    date: str
    customer: str
    rating: int
    votes: int
    helpful: int


@dataclass
class ProductRecord:
    """One product block of the amazon-meta file.

    Discontinued products carry only ``id`` and ``asin``.
    """

    id: int
    asin: str
    title: str | None = None
    group: str | None = None
    salesrank: int | None = None
    similar: list[str] = field(default_factory=list)
    categories: list[str] = field(default_factory=list)
    reviews: list[Review] = field(default_factory=list)
    discontinued: bool = False
    reviews_total: int | None = None
    avg_rating: float | None = None


def category_path(raw: str) -> list[str]:
    """Split ``|Books[283155]|Subjects[1000]|...`` into its segments."""
    return [part for part in raw.split("|") if part]


_REVIEWS_RE = re.compile(r"total:\s*(\d+)\s+downloaded:\s*(\d+)\s+avg rating:\s*([\d.]+)")
_REVIEW_LINE_RE = re.compile(
    r"(\S+)\s+cutomer:\s*(\S+)\s+rating:\s*(-?\d+)\s+votes:\s*(\d+)\s+helpful:\s*(\d+)"
)


def _blocks(stream: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(first_line_number, lines)`` for blank-line separated blocks."""
    block: list[str] = []
    start = 0
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if line.strip():
            if not block:
                start = lineno
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def _is_file_header(lines: list[str]) -> bool:
    return all(ln.startswith("#") or ln.startswith("Total items:") for ln in lines)


def _parse_block(start: int, lines: list[str]) -> ProductRecord:
    where = f"block at line {start}"
    head = lines[0].strip()
    if not head.startswith("Id:"):
        raise ParseError("block does not start with 'Id:'", where)
    try:
        pid = int(head[3:].strip())
    except ValueError:
        raise ParseError(f"bad Id line {head!r}", where) from None
    where = f"block Id {pid}"
    if len(lines) < 2 or not lines[1].strip().startswith("ASIN:"):
        raise ParseError("missing 'ASIN:' line", where)
    rec = ProductRecord(id=pid, asin=lines[1].strip()[5:].strip())

    i = 2
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if line == "discontinued product":
            rec.discontinued = True
        elif line.startswith("title:"):
            rec.title = line[6:].strip()
        elif line.startswith("group:"):
            rec.group = line[6:].strip()
        elif line.startswith("salesrank:"):
            rec.salesrank = int(line[10:].strip())
        elif line.startswith("similar:"):
            tokens = line[8:].split()
            declared = int(tokens[0])
            rec.similar = tokens[1:]
            if len(rec.similar) != declared:
                raise ParseError(f"similar declares {declared} ASINs, found {len(rec.similar)}", where)
        elif line.startswith("categories:"):
            declared = int(line[11:].strip())
            paths = [ln.strip() for ln in lines[i : i + declared]]
            if len(paths) != declared or any(not p.startswith("|") for p in paths):
                raise ParseError(f"categories declares {declared} paths", where)
            rec.categories = paths
            i += declared
        elif line.startswith("reviews:"):
            m = _REVIEWS_RE.search(line)
            if m is None:
                raise ParseError(f"bad reviews header {line!r}", where)
            rec.reviews_total = int(m.group(1))
            declared = int(m.group(2))
            rec.avg_rating = float(m.group(3))
            body = lines[i : i + declared]
            reviews = []
            for ln in body:
                rm = _REVIEW_LINE_RE.match(ln.strip())
                if rm is None:
                    break
                rating = int(rm.group(3))
                if not 1 <= rating <= 5:
                    raise ParseError(f"rating {rating} outside 1..5", where)
                reviews.append(Review(rm.group(1), rm.group(2), rating, int(rm.group(4)), int(rm.group(5))))
            if len(reviews) != declared:
                raise ParseError(f"reviews declares {declared} downloaded, found {len(reviews)}", where)
            rec.reviews = reviews
            i += declared
        else:
            raise ParseError(f"unrecognised line {line!r}", where)

    if rec.discontinued and (rec.title is not None or rec.group is not None or rec.salesrank is not None):
        raise ParseError("discontinued product carries product fields", where)
    return rec


def parse_metadata(stream: Iterable[str]) -> list[ProductRecord]:
    """Parse amazon-meta text into one :class:`ProductRecord` per ``Id:`` block.

    Leading ``#`` comment and ``Total items:`` lines are skipped.
    """
    records = []
    for start, lines in _blocks(stream):
        if not records and _is_file_header(lines):
            continue
        records.append(_parse_block(start, lines))
    return records


def load_metadata(path: str | Path) -> list[ProductRecord]:
    with open_text(path) as fh:
        return parse_metadata(fh)


def _fmt_rating(x: float) -> str:
    return str(int(x)) if x == int(x) else str(x)


def write_metadata(records: Iterable[ProductRecord]) -> str:
    """Serialise records back into the amazon-meta layout."""
    out = []
    for rec in records:
        lines = [f"Id:   {rec.id}", f"ASIN: {rec.asin}"]
        if rec.discontinued:
            lines.append("  discontinued product")
        else:
            if rec.title is not None:
                lines.append(f"  title: {rec.title}")
            if rec.group is not None:
                lines.append(f"  group: {rec.group}")
            if rec.salesrank is not None:
                lines.append(f"  salesrank: {rec.salesrank}")
            lines.append("  similar: " + "  ".join([str(len(rec.similar)), *rec.similar]))
            lines.append(f"  categories: {len(rec.categories)}")
            lines.extend(f"   {c}" for c in rec.categories)
            total = rec.reviews_total if rec.reviews_total is not None else len(rec.reviews)
            avg = rec.avg_rating if rec.avg_rating is not None else 0
            lines.append(f"  reviews: total: {total}  downloaded: {len(rec.reviews)}  avg rating: {_fmt_rating(avg)}")
            lines.extend(
                f"    {r.date}  cutomer: {r.customer}  rating: {r.rating}  votes: {r.votes:3d}  helpful: {r.helpful:3d}"
                for r in rec.reviews
            )
        out.append("\n".join(lines))
    return "\n\n".join(out) + "\n" if out else ""


def join_metadata(
    g: DirectedGraph, records: Iterable[ProductRecord]
) -> tuple[dict[int, ProductRecord], list[int]]:
    """Attach records to compacted nodes by ``record.id == original node id``.

    Returns ``(node -> record, unmatched record ids)``.
    """
    index = g.index
    by_node: dict[int, ProductRecord] = {}
    unmatched = []
    for rec in records:
        node = index.get(rec.id)
        if node is None:
            unmatched.append(rec.id)
        else:
            by_node[node] = rec
    return by_node, unmatched
