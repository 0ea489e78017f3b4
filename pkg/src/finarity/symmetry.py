"""Automorphism groups and orbit partitions of finite structures.

Over a finite structure a relation is ∅-definable exactly when every
automorphism preserves it, and the orbits of Aut(M) on M^k are exactly the
complete k-types. Everything downstream uses invariance as *the* meaning of
definability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapExceeded
from .structure import FiniteStructure, Relation, Tuple, check_size, coordinates, decode, encode, gather_index

MAX_UNIVERSE = 8

Permutation = tuple[int, ...]


def compose_perms(g: Permutation, h: Permutation) -> Permutation:
    """``g ∘ h``: apply h first."""
    return tuple(g[i] for i in h)


def invert(g: Permutation) -> Permutation:
    inv = [0] * len(g)
    for i, gi in enumerate(g):
        inv[gi] = i
    return tuple(inv)


def canonical_labels(raw: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel classes 0..c-1 in order of their lexicographically first tuple."""
    uniq, first, inv = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    return rank[inv.reshape(-1)], len(uniq)


def refine(labels: np.ndarray, other: np.ndarray) -> tuple[np.ndarray, int]:
    """Common refinement of two labelings of the same set."""
    other = np.asarray(other, dtype=np.int64)
    return canonical_labels(labels * (int(other.max()) + 1) + other)


@dataclass(frozen=True)
class AutomorphismGroup:
    m: int
    elements: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        ident = tuple(range(self.m))
        elems = set(self.elements)
        assert ident in elems, "identity missing"
        assert all(invert(g) in elems for g in self.elements), "not closed under inverses"
        # <generators> is built by closure inside G; equal sizes mean G is closed
        assert len(self._closure(self.generators)) == len(elems), "not closed under composition"

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: object) -> bool:
        return g in self._set

    @cached_property
    def _set(self) -> frozenset[Permutation]:
        return frozenset(self.elements)

    def _closure(self, gens: tuple[Permutation, ...]) -> set[Permutation]:
        ident = tuple(range(self.m))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    p = compose_perms(g, h)
                    if p not in seen:
                        assert p in self._set, "product of automorphisms left the group"
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        return seen

    @cached_property
    def generators(self) -> tuple[Permutation, ...]:
        """A small generating set, chosen by seeded random sampling (deterministic)."""
        rng = random.Random(0)
        pool = sorted(self.elements)
        gens: list[Permutation] = []
        span = {tuple(range(self.m))}
        while len(span) < len(pool):
            g = rng.choice(pool)
            if g in span:
                continue
            gens.append(g)
            span = self._closure(tuple(gens))
        return tuple(gens)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1


def _element_colors(s: FiniteStructure) -> list[tuple]:
    """Automorphism-invariant per-element data used to prune the search."""
    colors: list[list] = [[] for _ in range(s.m)]
    for rel in s.relations.values():
        if rel.k == 0:
            continue
        counts = np.zeros((s.m, rel.k), dtype=np.int64)
        for t in rel:
            for p, a in enumerate(t):
                counts[a, p] += 1
        for a in range(s.m):
            colors[a].append((tuple(counts[a]), (a,) * rel.k in rel))
    return [tuple(c) for c in colors]


def _search(s: FiniteStructure) -> list[Permutation]:
    m = s.m
    rels = [r for r in s.relations.values() if r.k > 0]
    # tuples that become fully mapped once element i receives its image
    completed: list[list[tuple[Relation, Tuple]]] = [[] for _ in range(m)]
    for r in rels:
        for t in r:
            completed[max(t)].append((r, t))
    colors = _element_colors(s)
    image = [-1] * m
    used = [False] * m
    found: list[Permutation] = []

    def extend(i: int) -> None:
        if i == m:
            found.append(tuple(image))
            return
        for j in range(m):
            if used[j] or colors[j] != colors[i]:
                continue
            image[i] = j
            # forward preservation is enough: an injective self-map of a finite set preserves its size
            if all(r.bits[encode([image[a] for a in t], m)] for r, t in completed[i]):
                used[j] = True
                extend(i + 1)
                used[j] = False
        image[i] = -1

    extend(0)
    return found


@lru_cache(maxsize=256)
def automorphisms(s: FiniteStructure, cap: int = MAX_UNIVERSE) -> AutomorphismGroup:
    """Every permutation of the universe preserving each relation, in lexicographic order."""
    if s.m > cap:
        raise CapExceeded(f"automorphism search is capped at m <= {cap}; structure {s.name} has m = {s.m}")
    return AutomorphismGroup(s.m, tuple(_search(s)))


def tuple_images(g: Permutation, m: int, k: int) -> np.ndarray:
    """Index of g·t for every t in M^k, in index order."""
    garr = np.asarray(g, dtype=np.int64)
    return gather_index(m, [garr[c] for c in coordinates(m, k)])


@dataclass(frozen=True, eq=False)
class OrbitPartition:
    """Orbits of Aut(M) on M^k; ``labels[i]`` is the orbit id of tuple index i.

    Ids are numbered by first (lexicographically least) member.
    """

    m: int
    k: int
    labels: np.ndarray = field(repr=False)
    count: int

    def orbit_of(self, t: Tuple) -> int:
        return int(self.labels[encode(t, self.m)])

    @cached_property
    def representatives(self) -> list[Tuple]:
        _, first = np.unique(self.labels, return_index=True)
        return [decode(int(i), self.m, self.k) for i in first]

    def members(self, orbit: int) -> Relation:
        return Relation(self.m, self.k, self.labels == orbit)

    def orbits(self) -> list[Relation]:
        return [self.members(i) for i in range(self.count)]

    def union(self, ids) -> Relation:
        return Relation(self.m, self.k, np.isin(self.labels, list(ids)))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.count)


@lru_cache(maxsize=512)
def orbit_partition(s: FiniteStructure, k: int) -> OrbitPartition:
    size = check_size(s.m, k)
    group = automorphisms(s)
    if k == 0 or group.is_trivial():
        return OrbitPartition(s.m, k, np.arange(size, dtype=np.int64), size)
    src = np.arange(size, dtype=np.int64)
    rows, cols = [], []
    for g in group.generators:
        rows.append(src)
        cols.append(tuple_images(g, s.m, k))
    rows_a, cols_a = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows_a), dtype=np.int8), (rows_a, cols_a)), shape=(size, size))
    _, raw = connected_components(graph, directed=False)
    labels, count = canonical_labels(raw)
    return OrbitPartition(s.m, k, labels, count)


def is_union_of_classes(labels: np.ndarray, count: int, bits: np.ndarray) -> bool:
    inside = np.bincount(labels, weights=bits, minlength=count)
    total = np.bincount(labels, minlength=count)
    return bool(np.all((inside == 0) | (inside == total)))


def is_definable(s: FiniteStructure, x: Relation) -> bool:
    """True iff ``x`` is a union of Aut(s)-orbits, i.e. ∅-definable in ``s``."""
    if x.m != s.m:
        return False
    op = orbit_partition(s, x.k)
    return is_union_of_classes(op.labels, op.count, x.bits)


def apply_perm(g: Permutation, x: Relation) -> Relation:
    """The image ``g[x]`` of a relation under a permutation of the universe."""
    bits = np.zeros_like(x.bits)
    bits[tuple_images(g, x.m, x.k)[x.bits]] = True
    return Relation(x.m, x.k, bits)
