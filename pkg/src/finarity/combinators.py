"""Constructions on relations and structures.

Relation level: cylinders, projections, Cartesian and mixed products/sums.
Structure level: disjoint unions, compositions ``M[N]``, and the singleton
expansions that make any finite theory binary or unary.

Coordinate positions are 0-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NameClash
from .structure import IDENT, FiniteStructure, Relation, check_size, coordinates, gather_index
from .symmetry import automorphisms, is_definable


@dataclass(frozen=True)
class CoordinateMap:
    """Where each coordinate of a source relation lands in a k-ary target."""

    k: int
    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        pos = tuple(self.positions)
        object.__setattr__(self, "positions", pos)
        if len(set(pos)) != len(pos):
            raise InputError(f"coordinate map {pos} is not injective")
        if any(not 0 <= p < self.k for p in pos):
            raise InputError(f"coordinate map {pos} leaves 0..{self.k - 1}")


def cylindrify(x: Relation, cmap: CoordinateMap) -> Relation:
    """``{t ∈ M^k : (t[p_0], ..., t[p_{j-1}]) ∈ x}``; the other coordinates are free."""
    if len(cmap.positions) != x.k:
        raise InputError(f"map has {len(cmap.positions)} positions for a relation of arity {x.k}")
    cols = coordinates(x.m, cmap.k)
    idx = gather_index(x.m, [cols[p] for p in cmap.positions])
    return Relation(x.m, cmap.k, x.bits[idx])


def project(x: Relation, positions: Sequence[int]) -> Relation:
    """Existential projection onto strictly increasing ``positions``."""
    positions = tuple(positions)
    if not positions:
        raise InputError("projection needs at least one position")
    if any(b <= a for a, b in zip(positions, positions[1:])) or not 0 <= positions[0] or positions[-1] >= x.k:
        raise InputError(f"positions {positions} must be strictly increasing within 0..{x.k - 1}")
    dropped = tuple(i for i in range(x.k) if i not in positions)
    arr = x.bits.reshape((x.m,) * x.k).any(axis=dropped)
    return Relation(x.m, len(positions), arr.reshape(-1))


def _same_universe(x: Relation, y: Relation) -> int:
    if x.m != y.m:
        raise InputError(f"relations over different universes (m={x.m}, m={y.m})")
    check_size(x.m, x.k + y.k)
    return x.m


def cartesian_product(x: Relation, y: Relation) -> Relation:
    m = _same_universe(x, y)
    return Relation(m, x.k + y.k, np.logical_and.outer(x.bits, y.bits).reshape(-1))


def cartesian_sum(x: Relation, y: Relation) -> Relation:
    """``{(a, b) : a ∈ x or b ∈ y}``, the dual of the Cartesian product."""
    m = _same_universe(x, y)
    return Relation(m, x.k + y.k, np.logical_or.outer(x.bits, y.bits).reshape(-1))


def _common_context(
    x: Relation, x_vars: Sequence[str], y: Relation, y_vars: Sequence[str], target: Sequence[str] | None
) -> tuple[tuple[str, ...], CoordinateMap, CoordinateMap]:
    for rel, names in ((x, x_vars), (y, y_vars)):
        if len(names) != rel.k or len(set(names)) != len(names):
            raise InputError(f"variables {list(names)} do not name the {rel.k} coordinates injectively")
    if x.m != y.m:
        raise InputError("relations over different universes")
    if target is None:
        target = tuple(x_vars) + tuple(v for v in y_vars if v not in x_vars)
    target = tuple(target)
    if len(set(target)) != len(target) or not set(x_vars) | set(y_vars) <= set(target):
        raise InputError(f"target context {list(target)} must list every variable exactly once")
    k = len(target)
    return (
        target,
        CoordinateMap(k, tuple(target.index(v) for v in x_vars)),
        CoordinateMap(k, tuple(target.index(v) for v in y_vars)),
    )


def mixed_product(
    x: Relation, x_vars: Sequence[str], y: Relation, y_vars: Sequence[str], target: Sequence[str] | None = None
) -> Relation:
    """Solutions of ``φ(x̄) ∧ ψ(ȳ)`` where the variable tuples may overlap."""
    _, cx, cy = _common_context(x, x_vars, y, y_vars, target)
    return cylindrify(x, cx) & cylindrify(y, cy)


def mixed_sum(
    x: Relation, x_vars: Sequence[str], y: Relation, y_vars: Sequence[str], target: Sequence[str] | None = None
) -> Relation:
    """Solutions of ``φ(x̄) ∨ ψ(ȳ)`` where the variable tuples may overlap."""
    _, cx, cy = _common_context(x, x_vars, y, y_vars, target)
    return cylindrify(x, cx) | cylindrify(y, cy)


# ------------------------------------------------------------- structures


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


@dataclass(frozen=True)
class DisjointUnion:
    structure: FiniteStructure
    offsets: tuple[int, ...]
    part_predicates: tuple[str, ...]
    renamed: dict[str, str]

    def to_json(self) -> dict:
        return {
            "offsets": list(self.offsets),
            "part_predicates": list(self.part_predicates),
            "renamed": dict(self.renamed),
            "elements": list(self.structure.elements),
        }


def disjoint_union(parts: Sequence[FiniteStructure], name: str | None = None) -> DisjointUnion:
    """Side-by-side union with a unary predicate marking each part.

    Relation names used by more than one part are prefixed with the part's
    structure name (``<part>_<rel>``, made unique with trailing underscores);
    each renaming is recorded as ``"<i>:<old>" -> new``.
    """
    if not parts:
        raise InputError("disjoint union of zero structures")
    counts: dict[str, int] = {}
    for p in parts:
        for r in p.relations:
            counts[r] = counts.get(r, 0) + 1
    taken = {r for r, c in counts.items() if c == 1}
    renamed: dict[str, str] = {}
    m = sum(p.m for p in parts)
    relations: dict[str, Relation] = {}
    offsets = []
    elements = []
    off = 0
    for i, p in enumerate(parts):
        offsets.append(off)
        elements.extend(f"{i}:{e}" for e in p.elements)
        for rname, rel in p.relations.items():
            new = rname
            if counts[rname] > 1:
                new = _fresh(f"{p.name}_{rname}" if IDENT.match(f"{p.name}_{rname}") else f"S{i}_{rname}", taken)
                renamed[f"{i}:{rname}"] = new
            bits = np.zeros(check_size(m, rel.k), dtype=bool)
            if rel.k == 0:
                bits[:] = rel.bits
            else:
                src = np.flatnonzero(rel.bits)
                cols = coordinates(p.m, rel.k)
                bits[gather_index(m, [c[src].astype(np.int64) + off for c in cols])] = True
            relations[new] = Relation(m, rel.k, bits)
        off += p.m
    predicates = []
    for i, p in enumerate(parts):
        pname = _fresh(f"P{i}", taken)
        predicates.append(pname)
        bits = np.zeros(m, dtype=bool)
        bits[offsets[i]:offsets[i] + p.m] = True
        relations[pname] = Relation(m, 1, bits)
    name = name or "_u_".join(p.name for p in parts)
    return DisjointUnion(FiniteStructure(name, m, relations, tuple(elements)), tuple(offsets), tuple(predicates), renamed)


@dataclass(frozen=True)
class Composition:
    """``M[N]``: element ``(a, b)`` is encoded as ``a * |N| + b``."""

    structure: FiniteStructure
    outer_size: int
    fiber_size: int

    def decode(self, i: int) -> tuple[int, int]:
        return divmod(i, self.fiber_size)

    def to_json(self) -> dict:
        return {
            "outer_size": self.outer_size,
            "fiber_size": self.fiber_size,
            "encoding": "a*fiber_size+b",
            "elements": list(self.structure.elements),
        }


def compose(outer: FiniteStructure, inner: FiniteStructure, name: str | None = None) -> Composition:
    """The composition ``outer[inner]`` on ``outer × inner``.

    Outer-only symbols hold when the first components are related; inner-only
    symbols hold when all first components coincide and the second
    components are related; a shared symbol holds when either does.
    """
    mo, mi = outer.m, inner.m
    m = mo * mi
    relations: dict[str, Relation] = {}
    for rname in list(outer.relations) + [r for r in inner.relations if r not in outer.relations]:
        ro, ri = outer.relations.get(rname), inner.relations.get(rname)
        k = (ro or ri).k  # type: ignore[union-attr]
        if ro is not None and ri is not None and ro.k != ri.k:
            raise InputError(f"symbol {rname} has arity {ro.k} in {outer.name} and {ri.k} in {inner.name}")
        check_size(m, k)
        cols = coordinates(m, k)
        firsts = [c // mi for c in cols]
        seconds = [c % mi for c in cols]
        bits = np.zeros(m**k, dtype=bool)
        if ro is not None:
            bits |= ro.bits[gather_index(mo, firsts)]
        if ri is not None:
            same_fiber = np.ones(m**k, dtype=bool)
            for f in firsts[1:]:
                same_fiber &= f == firsts[0]
            bits |= same_fiber & ri.bits[gather_index(mi, seconds)]
        relations[rname] = Relation(m, k, bits)
    elements = tuple(f"{a}.{b}" for a in outer.elements for b in inner.elements)
    s = FiniteStructure(name or f"{outer.name}[{inner.name}]", m, relations, elements)
    return Composition(s, mo, mi)


def fiber_relation(m: int, fiber_size: int) -> Relation:
    cols = coordinates(m, 2)
    return Relation(m, 2, cols[0] // fiber_size == cols[1] // fiber_size)


def e_definable_check(composed: FiniteStructure, fiber_size: int) -> bool:
    """Whether the same-fiber equivalence is ∅-definable (Aut-invariant)."""
    if fiber_size < 1 or composed.m % fiber_size:
        raise InputError(f"fiber size {fiber_size} does not divide m={composed.m}")
    return is_definable(composed, fiber_relation(composed.m, fiber_size))


def expand_with(s: FiniteStructure, name: str, x: Relation) -> FiniteStructure:
    if not IDENT.match(name):
        raise InputError(f"{name!r} is not a relation name")
    if x.m != s.m:
        raise InputError(f"relation over m={x.m} cannot expand a structure with m={s.m}")
    return s.with_relation(name, x, new_name=f"{s.name}+{name}")


def binarize(s: FiniteStructure) -> FiniteStructure:
    """Add every binary singleton ``B_i_j = {(i, j)}``."""
    check_size(s.m, 2)
    rels = dict(s.relations)
    taken = set(rels)
    for i, j in itertools.product(range(s.m), repeat=2):
        name = f"B_{i}_{j}"
        if name in taken:
            raise NameClash(f"{s.name} already has a relation named {name}")
        rels[name] = Relation.from_tuples(s.m, 2, [(i, j)])
    return FiniteStructure(f"{s.name}+B", s.m, rels, s.elements)


def unarize(s: FiniteStructure) -> FiniteStructure:
    """Add every unary singleton ``U_i = {i}``."""
    rels = dict(s.relations)
    for i in range(s.m):
        name = f"U_{i}"
        if name in rels:
            raise NameClash(f"{s.name} already has a relation named {name}")
        rels[name] = Relation.from_tuples(s.m, 1, [(i,)])
    return FiniteStructure(f"{s.name}+U", s.m, rels, s.elements)


def binarization_bounds(s: FiniteStructure) -> dict:
    """Both measures for the binarized expansion.

    The singleton basis gives a quantifier-free 2-ary description of every
    definable set by construction; the semantic arity is lower because the
    expansion is rigid.
    """
    from .arity import theory_arity

    b = binarize(s)
    return {
        "structure": s.name,
        "basis_bound": 2,
        "semantic_arity": theory_arity(b).arity,
        "rigid": automorphisms(b).is_trivial(),
    }
