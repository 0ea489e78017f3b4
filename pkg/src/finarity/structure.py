"""Finite relational structures and relations stored as dense bit arrays.

A k-ary relation over the universe ``{0, ..., m-1}`` is a boolean vector of
length ``m**k``; the tuple ``(t_0, ..., t_{k-1})`` lives at index
``t_0*m**(k-1) + ... + t_{k-1}``, so index order is lexicographic tuple order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, CapExceeded, ElementOutOfRange, InputError, NameClash

RELATION_CAP = 1 << 27

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Tuple = tuple[int, ...]


def check_size(m: int, k: int) -> int:
    """Return ``m**k`` or raise if it exceeds the dense-relation cap."""
    if m < 1:
        raise InputError(f"universe size must be >= 1, got {m}")
    if k < 0:
        raise InputError(f"arity must be >= 0, got {k}")
    size = m**k
    if size > RELATION_CAP:
        raise CapExceeded(f"{m}**{k} = {size} tuples exceeds the cap of {RELATION_CAP}")
    return size


@lru_cache(maxsize=32)
def coordinates(m: int, k: int) -> tuple[np.ndarray, ...]:
    """Column ``j`` holds the j-th coordinate of every tuple of M^k, in index order."""
    size = check_size(m, k)
    if k == 0:
        return ()
    dtype = np.min_scalar_type(m - 1)
    cols = np.unravel_index(np.arange(size), (m,) * k)
    out = []
    for c in cols:
        c = c.astype(dtype)
        c.setflags(write=False)
        out.append(c)
    return tuple(out)


def encode(t: Sequence[int], m: int) -> int:
    i = 0
    for a in t:
        i = i * m + a
    return i


def decode(i: int, m: int, k: int) -> Tuple:
    out = [0] * k
    for j in range(k - 1, -1, -1):
        i, out[j] = divmod(i, m)
    return tuple(out)


def gather_index(m: int, cols: Sequence[np.ndarray]) -> np.ndarray:
    """Encode a list of coordinate columns (any integer dtype) as tuple indices."""
    if not cols:
        return np.zeros(1, dtype=np.int64)
    idx = np.zeros(len(cols[0]), dtype=np.int64)
    for c in cols:
        idx *= m
        idx += c
    return idx


@dataclass(frozen=True, eq=False)
class Relation:
    """A k-ary relation on ``{0..m-1}``; immutable, hashable, compared by content."""

    m: int
    k: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        size = check_size(self.m, self.k)
        bits = np.array(self.bits, dtype=bool).reshape(-1)
        if bits.size != size:
            raise ArityMismatch(f"bit vector of length {bits.size} does not match {self.m}**{self.k}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "_hash", hash((self.m, self.k, np.packbits(bits).tobytes())))

    @classmethod
    def empty(cls, m: int, k: int) -> Relation:
        return cls(m, k, np.zeros(check_size(m, k), dtype=bool))

    @classmethod
    def full(cls, m: int, k: int) -> Relation:
        return cls(m, k, np.ones(check_size(m, k), dtype=bool))

    @classmethod
    def from_tuples(cls, m: int, k: int, tuples: Iterable[Sequence[int]]) -> Relation:
        bits = np.zeros(check_size(m, k), dtype=bool)
        for t in tuples:
            t = tuple(t)
            if len(t) != k:
                raise ArityMismatch(f"tuple {t} has length {len(t)}, expected {k}")
            for a in t:
                if not isinstance(a, (int, np.integer)) or not 0 <= a < m:
                    raise ElementOutOfRange(f"element {a!r} of tuple {t} is outside 0..{m - 1}")
            bits[encode(t, m)] = True
        return cls(m, k, bits)

    @classmethod
    def diagonal(cls, m: int, k: int, i: int = 0, j: int = 1) -> Relation:
        """The set of k-tuples whose coordinates i and j agree."""
        cols = coordinates(m, k)
        return cls(m, k, cols[i] == cols[j])

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return (self.m, self.k) == (other.m, other.k) and np.array_equal(self.bits, other.bits)

    def _same_shape(self, other: Relation) -> None:
        if (self.m, self.k) != (other.m, other.k):
            raise ArityMismatch(f"relations over M^{self.k} (m={self.m}) and M^{other.k} (m={other.m})")

    def __invert__(self) -> Relation:
        return Relation(self.m, self.k, ~self.bits)

    def __and__(self, other: Relation) -> Relation:
        self._same_shape(other)
        return Relation(self.m, self.k, self.bits & other.bits)

    def __or__(self, other: Relation) -> Relation:
        self._same_shape(other)
        return Relation(self.m, self.k, self.bits | other.bits)

    def __xor__(self, other: Relation) -> Relation:
        self._same_shape(other)
        return Relation(self.m, self.k, self.bits ^ other.bits)

    def __sub__(self, other: Relation) -> Relation:
        self._same_shape(other)
        return Relation(self.m, self.k, self.bits & ~other.bits)

    def __le__(self, other: Relation) -> bool:
        self._same_shape(other)
        return not np.any(self.bits & ~other.bits)

    def __contains__(self, t: object) -> bool:
        t = tuple(t)  # type: ignore[arg-type]
        if len(t) != self.k or not all(0 <= a < self.m for a in t):
            return False
        return bool(self.bits[encode(t, self.m)])

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __iter__(self) -> Iterator[Tuple]:
        for i in np.flatnonzero(self.bits):
            yield decode(int(i), self.m, self.k)

    def tuples(self) -> list[Tuple]:
        """Members in lexicographic order."""
        return list(self)

    def is_empty(self) -> bool:
        return not self.bits.any()

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def __repr__(self) -> str:
        return f"Relation(m={self.m}, k={self.k}, size={len(self)})"


def relation_from_tuples(k: int, tuples: Iterable[Sequence[int]], m: int) -> Relation:
    return Relation.from_tuples(m, k, tuples)


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise NameClash(f"duplicate relation symbols in {names}")
        for name, k in self.symbols:
            if not IDENT.match(name):
                raise InputError(f"relation name {name!r} is not an identifier")
            if k < 0:
                raise InputError(f"relation {name} has negative arity")

    def arity(self, name: str) -> int:
        return dict(self.symbols)[name]

    def __contains__(self, name: object) -> bool:
        return any(n == name for n, _ in self.symbols)


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """A finite structure with universe ``{0..m-1}`` and named relations.

    ``elements`` optionally carries display names for the universe, in index
    order; they are what reports print next to raw indices.
    """

    name: str
    m: int
    relations: Mapping[str, Relation] = field(default_factory=dict)
    elements: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise InputError(f"universe size must be >= 1, got {self.m}")
        rels = dict(self.relations)
        Signature(tuple((n, r.k) for n, r in rels.items()))
        for n, r in rels.items():
            if r.m != self.m:
                raise ElementOutOfRange(f"relation {n} lives on a universe of size {r.m}, not {self.m}")
        object.__setattr__(self, "relations", MappingProxyType(rels))
        elements = tuple(str(i) for i in range(self.m)) if self.elements is None else tuple(self.elements)
        if len(elements) != self.m or len(set(elements)) != self.m:
            raise InputError(f"need {self.m} distinct element names, got {list(elements)}")
        object.__setattr__(self, "elements", elements)
        key = (self.name, self.m, elements, tuple((n, hash(r)) for n, r in rels.items()))
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    @property
    def signature(self) -> Signature:
        return Signature(tuple((n, r.k) for n, r in self.relations.items()))

    def __getitem__(self, name: str) -> Relation:
        return self.relations[name]

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteStructure):
            return NotImplemented
        if self._key != other._key:  # type: ignore[attr-defined]
            return False
        return all(self.relations[n] == other.relations[n] for n in self.relations)

    def with_relation(self, name: str, rel: Relation, new_name: str | None = None) -> FiniteStructure:
        if name in self.relations:
            raise NameClash(f"relation {name!r} already present in {self.name}")
        rels = dict(self.relations)
        rels[name] = rel
        return FiniteStructure(new_name or self.name, self.m, rels, self.elements)

    def permuted(self, perm: Sequence[int], name: str | None = None) -> FiniteStructure:
        """Isomorphic copy moving element ``i`` to ``perm[i]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.m)):
            raise InputError(f"{perm} is not a permutation of 0..{self.m - 1}")
        p = np.asarray(perm)
        rels = {}
        for n, r in self.relations.items():
            cols = coordinates(self.m, r.k)
            idx = gather_index(self.m, [p[c] for c in cols])
            bits = np.zeros_like(r.bits)
            bits[idx[r.bits]] = True
            rels[n] = Relation(self.m, r.k, bits)
        names = [""] * self.m
        for i, j in enumerate(perm):
            names[j] = self.elements[i]
        return FiniteStructure(name or self.name, self.m, rels, tuple(names))

    def __repr__(self) -> str:
        sig = ", ".join(f"{n}/{r.k}" for n, r in self.relations.items())
        return f"FiniteStructure({self.name!r}, m={self.m}, [{sig}])"


def all_tuples(m: int, k: int) -> Iterator[Tuple]:
    return itertools.product(range(m), repeat=k)
