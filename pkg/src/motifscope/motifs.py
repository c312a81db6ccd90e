"""Isomorphism classes of connected 3- and 4-node digraphs.

Every ``k*(k-1)``-bit adjacency mask is canonicalised by brute force (minimum
value over all ``k!`` relabelings) once, and the result is cached as a flat
``mask -> class_id`` table so classification in the census loop is a list
lookup. Class IDs are assigned in ``(edge_count, canonical_mask)`` order,
starting at 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from motifscope.graph import AdjacencyBitmask, pair_bit

__all__ = [
    "MotifCatalog",
    "MotifClass",
    "LEGACY_ALIASES_3",
    "build_catalog",
    "canonical_form",
    "is_weakly_connected",
    "legacy_alias_ids",
]

SUPPORTED_K = (3, 4)


def _check_k(k: int) -> None:
    if k not in SUPPORTED_K:
        raise ValueError(f"motif order must be 3 or 4, got {k}")


@lru_cache(maxsize=None)
def _bit_permutations(k: int) -> tuple[tuple[int, ...], ...]:
    """For each node permutation, the destination of every source bit."""
    tables = []
    for perm in permutations(range(k)):
        dest = [0] * (k * (k - 1))
        for i in range(k):
            for j in range(k):
                if i != j:
                    dest[pair_bit(i, j, k)] = pair_bit(perm[i], perm[j], k)
        tables.append(tuple(dest))
    return tuple(tables)


def _apply(bits: int, dest: tuple[int, ...]) -> int:
    out = 0
    pos = 0
    while bits:
        if bits & 1:
            out |= 1 << dest[pos]
        bits >>= 1
        pos += 1
    return out


def _canonical_bits(bits: int, k: int) -> int:
    return min(_apply(bits, dest) for dest in _bit_permutations(k))


def canonical_form(b: AdjacencyBitmask) -> AdjacencyBitmask:
    """Minimum-valued relabeling of ``b``."""
    _check_k(b.k)
    return AdjacencyBitmask(b.k, _canonical_bits(b.bits, b.k))


def is_weakly_connected(b: AdjacencyBitmask) -> bool:
    k = b.k
    nbrs = [0] * k
    for i, j in b.edges():
        nbrs[i] |= 1 << j
        nbrs[j] |= 1 << i
    seen = 1
    frontier = 1
    while frontier:
        grow = 0
        for i in range(k):
            if frontier >> i & 1:
                grow |= nbrs[i]
        frontier = grow & ~seen
        seen |= frontier
    return seen == (1 << k) - 1


@dataclass(frozen=True)
class MotifClass:
    k: int
    class_id: int
    canonical_bitmask: AdjacencyBitmask
    edge_count: int
    in_degree_profile: tuple[int, ...]

    @property
    def in_degrees(self) -> tuple[int, ...]:
        """In-degree of each position of the canonical representative."""
        return self.canonical_bitmask.in_degrees()

    @property
    def has_mutual_pair(self) -> bool:
        b = self.canonical_bitmask
        return any(b.has_edge(j, i) for i, j in b.edges())


@dataclass(frozen=True)
class MotifCatalog:
    """Ordered classes for one motif order plus the full classification table.

    ``table[mask]`` is the class ID of any raw k-node mask, or 0 when the
    mask is not weakly connected.
    """

    k: int
    classes: tuple[MotifClass, ...]
    table: tuple[int, ...]

    @property
    def lookup(self) -> dict[int, int]:
        """Canonical mask value -> class ID."""
        return {c.canonical_bitmask.bits: c.class_id for c in self.classes}

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, class_id: int) -> MotifClass:
        if not 1 <= class_id <= len(self.classes):
            raise KeyError(class_id)
        return self.classes[class_id - 1]

    def classify(self, b: AdjacencyBitmask | int) -> int:
        bits = b.bits if isinstance(b, AdjacencyBitmask) else b
        return self.table[bits]


@lru_cache(maxsize=None)
def build_catalog(k: int) -> MotifCatalog:
    """Enumerate all weakly connected k-node digraphs up to isomorphism."""
    _check_k(k)
    size = 1 << (k * (k - 1))
    canon_of = [0] * size
    canon_set = set()
    for bits in range(size):
        if is_weakly_connected(AdjacencyBitmask(k, bits)):
            c = _canonical_bits(bits, k)
            canon_of[bits] = c
            canon_set.add(c)
        else:
            canon_of[bits] = -1
    ordered = sorted(canon_set, key=lambda c: (c.bit_count(), c))
    id_of = {c: i for i, c in enumerate(ordered, 1)}
    classes = tuple(
        MotifClass(
            k=k,
            class_id=id_of[c],
            canonical_bitmask=AdjacencyBitmask(k, c),
            edge_count=c.bit_count(),
            in_degree_profile=tuple(sorted(AdjacencyBitmask(k, c).in_degrees())),
        )
        for c in ordered
    )
    table = tuple(id_of[c] if c >= 0 else 0 for c in canon_of)
    return MotifCatalog(k, classes, table)


# Widely quoted legacy 3-node MotifIds whose structure is known, matched to our
# classes by a structural predicate. Other legacy IDs (9, say) are not mapped.
LEGACY_ALIASES_3 = {
    1: "diverging 2-edge: one source pointing at two sinks",
    3: "mutual pair plus one edge leaving the pair; all in-degrees 1",
    4: "converging 2-edge: two sources pointing at one sink",
    10: "mutual pair plus one edge entering the pair; in-degrees (0,1,2)",
}


def _alias_matches(legacy_id: int, cls: MotifClass) -> bool:
    profile = cls.in_degree_profile
    if legacy_id == 1:
        return cls.edge_count == 2 and profile == (0, 1, 1) and max(cls.canonical_bitmask.out_degrees()) == 2
    if legacy_id == 4:
        return cls.edge_count == 2 and profile == (0, 0, 2)
    if legacy_id == 3:
        return cls.edge_count == 3 and profile == (1, 1, 1) and cls.has_mutual_pair
    if legacy_id == 10:
        return cls.edge_count == 3 and profile == (0, 1, 2) and cls.has_mutual_pair
    raise KeyError(legacy_id)


@lru_cache(maxsize=None)
def legacy_alias_ids() -> dict[int, int]:
    """Map legacy 3-node MotifIds (1, 3, 4, 10) to our class IDs."""
    catalog = build_catalog(3)
    out = {}
    for pid in LEGACY_ALIASES_3:
        matches = [c.class_id for c in catalog if _alias_matches(pid, c)]
        if len(matches) != 1:
            raise RuntimeError(f"alias {pid} matched {matches}")
        out[pid] = matches[0]
    return out
