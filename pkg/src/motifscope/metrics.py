"""Purchasability and Motif Rank of motif classes.

Purchasability of a motif node is its in-degree inside the motif divided by
the motif's edge count, and is undefined for nodes with in-degree zero. Motif
Rank is the fraction of nodes whose purchasability is defined. Both measures
are usually stated for 3-node motifs; the 4-node values here apply the same
formulas unchanged, as an extension. Values are
exact :class:`fractions.Fraction`; values for different motif orders are not
comparable, so every row carries its ``k``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from motifscope.motifs import MotifCatalog, MotifClass

__all__ = [
    "MotifMetrics",
    "format_ratio",
    "metrics_for",
    "metrics_table",
    "motif_rank",
    "purchasability",
]


def purchasability(cls: MotifClass, position: int) -> Fraction | None:
    if not 0 <= position < cls.k:
        raise IndexError(f"position {position} outside motif of order {cls.k}")
    indeg = cls.in_degrees[position]
    if indeg == 0:
        return None
    return Fraction(indeg, cls.edge_count)


def motif_rank(cls: MotifClass) -> Fraction:
    defined = sum(1 for d in cls.in_degrees if d > 0)
    return Fraction(defined, cls.k)


@dataclass(frozen=True)
class MotifMetrics:
    class_id: int
    k: int
    edge_count: int
    purchasability: tuple[Fraction | None, ...]
    motif_rank: Fraction

    def by_in_degree(self) -> list[tuple[int, Fraction, int]]:
        """``(in_degree, f, multiplicity)`` for each distinct positive in-degree.

        Positions of a canonical form have no fixed geometry, so the values
        are best read as a multiset keyed by in-degree.
        """
        counts = Counter(
            f.numerator * self.edge_count // f.denominator for f in self.purchasability if f is not None
        )
        return [(d, Fraction(d, self.edge_count), counts[d]) for d in sorted(counts)]

    def values(self) -> list[Fraction]:
        """Defined purchasability values, ascending."""
        return sorted(f for f in self.purchasability if f is not None)


def metrics_for(cls: MotifClass) -> MotifMetrics:
    return MotifMetrics(
        class_id=cls.class_id,
        k=cls.k,
        edge_count=cls.edge_count,
        purchasability=tuple(purchasability(cls, i) for i in range(cls.k)),
        motif_rank=motif_rank(cls),
    )


def metrics_table(catalog: MotifCatalog) -> list[MotifMetrics]:
    return [metrics_for(c) for c in catalog]


def format_ratio(x: Fraction, places: int = 4) -> str:
    """Fixed-point rendering, rounded half-up."""
    scale = 10**places
    q = (x * scale * 2 + 1) // 2
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // scale}.{q % scale:0{places}d}"
