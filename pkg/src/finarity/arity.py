"""Arity of definable relations and of the theory of a finite structure.

A relation X ⊆ M^k is n-ary when it is a Boolean combination of sets of the
form ``{t : (t_{i_1},...,t_{i_n}) ∈ Y}`` with Y ∅-definable in M^n (plus the
diagonals ``t_i = t_j`` when n = 1). Those generators are all unions of
*level-n fingerprint classes*: two k-tuples share a class when, for every
increasing index set S of size min(n, k), their projections onto S lie in
the same Aut(M)-orbit of M^n (and, for n = 1, they have the same equality
pattern). Selections that repeat or permute indices add nothing, because the
orbit of a projection onto S determines the orbit of any selection drawn
from S. So X is n-ary iff X is a union of fingerprint classes, and the
theory is n-ary iff fingerprint classes coincide with orbits on M^k for every
k in (n, |M|]. :func:`closure_oracle` recomputes the same algebra the slow way
from the literal definition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapExceeded, InputError, NotDefinable
from .structure import FiniteStructure, Relation, Tuple, check_size, coordinates, decode, encode, gather_index
from .symmetry import (
    automorphisms,
    is_definable,
    is_union_of_classes,
    orbit_partition,
    refine,
)


@dataclass(frozen=True, eq=False)
class Classes:
    """A partition of M^k given by canonical labels (ids ordered by first tuple)."""

    m: int
    k: int
    labels: np.ndarray = field(repr=False)
    count: int

    def members(self, cls: int) -> Relation:
        return Relation(self.m, self.k, self.labels == cls)

    def class_of(self, t: Tuple) -> int:
        return int(self.labels[encode(t, self.m)])


@lru_cache(maxsize=64)
def equality_patterns(m: int, k: int) -> Classes:
    """Partition of M^k by which coordinates coincide."""
    size = check_size(m, k)
    labels = np.zeros(size, dtype=np.int64)
    count = 1
    cols = coordinates(m, k)
    for i, j in itertools.combinations(range(k), 2):
        labels, count = refine(labels, cols[i] == cols[j])
    return Classes(m, k, labels, count)


def _orbit_classes(s: FiniteStructure, k: int) -> Classes:
    op = orbit_partition(s, k)
    return Classes(s.m, k, op.labels, op.count)


@lru_cache(maxsize=512)
def fingerprint_partition(s: FiniteStructure, k: int, n: int) -> Classes:
    """Level-n fingerprint classes of M^k; these are the atoms of BA_kn."""
    if n < 1:
        raise InputError(f"fingerprint level must be >= 1, got {n}")
    if k <= n:
        return _orbit_classes(s, k)
    m = s.m
    check_size(m, k)
    orb = orbit_partition(s, n).labels
    cols = coordinates(m, k)
    labels = np.zeros(m**k, dtype=np.int64)
    count = 1
    for subset in itertools.combinations(range(k), n):
        labels, count = refine(labels, orb[gather_index(m, [cols[j] for j in subset])])
    if n == 1:
        labels, count = refine(labels, equality_patterns(m, k).labels)
    return Classes(m, k, labels, count)


def fingerprint(s: FiniteStructure, t: Sequence[int], n: int) -> tuple:
    """The level-n fingerprint of a single tuple (orbit ids, then equality bits for n = 1)."""
    t = tuple(t)
    k = len(t)
    if k <= n:
        return (orbit_partition(s, k).orbit_of(t),)
    op = orbit_partition(s, n)
    fp: tuple = tuple(op.orbit_of(tuple(t[i] for i in sub)) for sub in itertools.combinations(range(k), n))
    if n == 1:
        fp += tuple(t[i] == t[j] for i, j in itertools.combinations(range(k), 2))
    return fp


@dataclass(frozen=True)
class Witness:
    """Two k-tuples with equal level-n fingerprints that the target relation separates."""

    n: int
    first: Tuple
    second: Tuple

    def to_json(self) -> list:
        return [list(self.first), list(self.second)]


def verify_witness(s: FiniteStructure, x: Relation, w: Witness) -> None:
    assert fingerprint(s, w.first, w.n) == fingerprint(s, w.second, w.n), f"fingerprints differ: {w}"
    assert (w.first in x) != (w.second in x), f"membership agrees: {w}"


def _mixed_pair(classes: Classes, bits: np.ndarray) -> tuple[Tuple, Tuple] | None:
    inside = np.bincount(classes.labels, weights=bits, minlength=classes.count)
    total = np.bincount(classes.labels, minlength=classes.count)
    mixed = np.flatnonzero((inside > 0) & (inside < total))
    if len(mixed) == 0:
        return None
    members = np.flatnonzero(classes.labels == mixed[0])
    a = int(members[0])
    b = int(members[np.flatnonzero(bits[members] != bits[a])[0]])
    return decode(a, classes.m, classes.k), decode(b, classes.m, classes.k)


def _require_definable(s: FiniteStructure, x: Relation) -> None:
    if x.m != s.m:
        raise InputError(f"relation lives on m={x.m}, structure {s.name} has m={s.m}")
    if not is_definable(s, x):
        raise NotDefinable(f"relation {x!r} is not invariant under Aut({s.name}), so it is not ∅-definable")


def nary_witness(s: FiniteStructure, x: Relation, n: int) -> Witness | None:
    """None if ``x`` is n-ary in ``s``; otherwise a verified Witness."""
    if n < 1:
        raise InputError("n must be >= 1; use formula_arity for the sentence case")
    _require_definable(s, x)
    if x.k <= n:
        return None
    pair = _mixed_pair(fingerprint_partition(s, x.k, n), x.bits)
    if pair is None:
        return None
    w = Witness(n, *pair)
    verify_witness(s, x, w)
    return w


def is_nary(s: FiniteStructure, x: Relation, n: int) -> bool:
    return nary_witness(s, x, n) is None


def formula_arity(s: FiniteStructure, x: Relation) -> int:
    """ar(φ) for the definable set ``x = φ(M)``: 0 for ∅ and M^k, else the least n."""
    _require_definable(s, x)
    if x.is_empty() or x.is_full():
        return 0
    for n in range(1, x.k + 1):
        if nary_witness(s, x, n) is None:
            return n
    raise AssertionError("every k-ary relation is k-ary")


@dataclass(frozen=True)
class LevelDiagnostics:
    k: int
    orbits: int
    fingerprint_classes: dict[int, int]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "orbits": self.orbits,
            "fingerprint_classes": [{"n": n, "classes": c} for n, c in sorted(self.fingerprint_classes.items())],
        }


@dataclass(frozen=True)
class ArityReport:
    structure: str
    m: int
    arity: int
    per_k: tuple[LevelDiagnostics, ...]
    witnesses: tuple[Witness, ...]
    elements: tuple[str, ...]
    max_k: int

    def __post_init__(self) -> None:
        assert 1 <= self.arity <= max(1, self.m)
        assert bool(self.witnesses) == (self.arity > 1)

    def to_json(self) -> dict:
        return {
            "structure": self.structure,
            "arity": self.arity,
            "max_k": self.max_k,
            "per_k": [d.to_json() for d in self.per_k],
            "witnesses": [w.to_json() for w in self.witnesses],
            "rejected_n": [w.n for w in self.witnesses],
            "elements": list(self.elements),
        }


def _theory_witness(s: FiniteStructure, k: int, n: int) -> Witness:
    fp = fingerprint_partition(s, k, n)
    orb = orbit_partition(s, k)
    for cls in range(fp.count):
        members = np.flatnonzero(fp.labels == cls)
        ids = orb.labels[members]
        other = np.flatnonzero(ids != ids[0])
        if len(other):
            first = decode(int(members[0]), s.m, k)
            second = decode(int(members[other[0]]), s.m, k)
            w = Witness(n, first, second)
            verify_witness(s, orb.members(int(ids[0])), w)
            return w
    raise AssertionError("no separating pair although class counts differ")


def theory_arity(s: FiniteStructure, max_k: int | None = None) -> ArityReport:
    """ar(Th(s)): the least n >= 1 whose fingerprints match orbits on M^k for all k in (n, max_k].

    With the default ``max_k = m`` the answer is exact, since a tuple longer
    than m repeats an element and reduces to a shorter one.
    """
    automorphisms(s)
    max_k = s.m if max_k is None else max_k
    if max_k < 1:
        raise InputError("max_k must be >= 1")
    orbits = {k: orbit_partition(s, k).count for k in range(1, max_k + 1)}
    per_k = tuple(
        LevelDiagnostics(k, orbits[k], {n: fingerprint_partition(s, k, n).count for n in range(1, k)})
        for k in range(1, max_k + 1)
    )
    witnesses = []
    arity = max_k
    for n in range(1, max_k + 1):
        failing = next((k for k in range(n + 1, max_k + 1) if per_k[k - 1].fingerprint_classes[n] != orbits[k]), None)
        if failing is None:
            arity = n
            break
        witnesses.append(_theory_witness(s, failing, n))
    return ArityReport(s.name, s.m, arity, per_k, tuple(witnesses), tuple(s.elements), max_k)


def n_transitive(s: FiniteStructure, n: int) -> bool:
    """Orbits on M^n are exactly the equality-pattern classes."""
    if n < 0:
        raise InputError("n must be >= 0")
    return orbit_partition(s, n).count == equality_patterns(s.m, n).count


@dataclass(frozen=True)
class TransitivityProfile:
    flags: dict[int, bool]
    degree: int

    def to_json(self) -> dict:
        return {"degree": self.degree, "flags": {str(n): f for n, f in sorted(self.flags.items())}}


def transitivity_profile(s: FiniteStructure, max_n: int | None = None) -> TransitivityProfile:
    max_n = s.m if max_n is None else max_n
    flags = {n: n_transitive(s, n) for n in range(1, max_n + 1)}
    for n in range(1, max_n):
        assert flags[n] or not flags[n + 1], "transitivity must be downward monotone"
    degree = max((n for n, f in flags.items() if f), default=0)
    return TransitivityProfile(flags, degree)


@dataclass(frozen=True)
class QEResult:
    """Outcome of the quantifier-elimination check; falsy when it fails."""

    holds: bool
    k: int | None = None
    first: Tuple | None = None
    second: Tuple | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        out: dict = {"holds": self.holds}
        if not self.holds:
            out.update(k=self.k, witness=[list(self.first), list(self.second)])
        return out


def atomic_type_partition(s: FiniteStructure, k: int, stop_at: int | None = None) -> Classes:
    """Partition of M^k by quantifier-free type (equalities and all atomic facts)."""
    m = s.m
    cls = equality_patterns(m, k)
    labels, count = cls.labels, cls.count
    cols = coordinates(m, k)
    for rel in s.relations.values():
        if rel.k == 0 or k == 0:
            continue
        for sel in itertools.product(range(k), repeat=rel.k):
            if stop_at is not None and count >= stop_at:
                return Classes(m, k, labels, count)
            labels, count = refine(labels, rel.bits[gather_index(m, [cols[j] for j in sel])])
    return Classes(m, k, labels, count)


def qe_check(s: FiniteStructure) -> QEResult:
    """True iff atomic types coincide with orbits on M^k for every k <= m."""
    automorphisms(s)
    for k in range(1, s.m + 1):
        orb = orbit_partition(s, k)
        atomic = atomic_type_partition(s, k, stop_at=orb.count)
        if atomic.count != orb.count:
            for cls in range(atomic.count):
                members = np.flatnonzero(atomic.labels == cls)
                ids = orb.labels[members]
                other = np.flatnonzero(ids != ids[0])
                if len(other):
                    return QEResult(False, k, decode(int(members[0]), s.m, k), decode(int(members[other[0]]), s.m, k))
    return QEResult(True)


@dataclass(frozen=True, eq=False)
class BooleanAlgebraAtoms:
    """Atoms of BA_kn: every n-ary definable subset of M^k is a union of them."""

    k: int
    n: int
    count: int
    orbit_count: int
    labels: np.ndarray = field(repr=False)

    @property
    def algebra_size(self) -> int:
        return 2**self.count

    @property
    def is_full(self) -> bool:
        """BA_kn equals the algebra of all definable subsets of M^k."""
        return self.count == self.orbit_count

    def contains(self, x: Relation) -> bool:
        return is_union_of_classes(self.labels, self.count, x.bits)

    def atom_of(self, t: Tuple, m: int) -> int:
        return int(self.labels[encode(t, m)])


def ba_atoms(s: FiniteStructure, k: int, n: int) -> BooleanAlgebraAtoms:
    fp = fingerprint_partition(s, k, n)
    return BooleanAlgebraAtoms(k, n, fp.count, orbit_partition(s, k).count, fp.labels)


# ---------------------------------------------------------------- oracle

ORACLE_MAX_M = 4
ORACLE_MAX_K = 3


@lru_cache(maxsize=128)
def _oracle_atoms(s: FiniteStructure, k: int, n: int) -> tuple[frozenset, ...]:
    m = s.m
    universe = range(m)
    rel_sets = [(set(r), r.k) for r in s.relations.values()]
    perms = [
        p for p in itertools.permutations(universe)
        if all(tuple(p[a] for a in t) in rs for rs, _ in rel_sets for t in rs)
    ]
    orbits: dict[tuple, frozenset] = {}
    for t in itertools.product(universe, repeat=n):
        if t not in orbits:
            orb = frozenset(tuple(p[a] for a in t) for p in perms)
            for u in orb:
                orbits[u] = orb
    space = list(itertools.product(universe, repeat=k))
    generators: list[frozenset] = []
    for sel in itertools.product(range(k), repeat=n):
        for orb in set(orbits.values()):
            generators.append(frozenset(t for t in space if tuple(t[i] for i in sel) in orb))
    if n == 1:
        for i, j in itertools.combinations(range(k), 2):
            generators.append(frozenset(t for t in space if t[i] == t[j]))
    # atoms of the Boolean closure: split every block by every generator
    blocks = [frozenset(space)]
    for g in generators:
        nxt = []
        for b in blocks:
            for part in (b & g, b - g):
                if part:
                    nxt.append(part)
        blocks = nxt
    return tuple(sorted(blocks, key=min))


def closure_oracle(
    s: FiniteStructure, x: Relation, n: int, max_m: int = ORACLE_MAX_M, max_k: int = ORACLE_MAX_K
) -> bool:
    """Brute-force n-arity from the definition.

    Generators are the cylinders ``{t : t restricted to a selection of n
    coordinates (repetition allowed) lies in an orbit of M^n}``, plus the
    diagonals when n = 1, with orbits from a plain filter over all m!
    permutations. Closing them under complement and intersection yields a
    finite Boolean algebra; membership of ``x`` is tested against its atoms.
    """
    if s.m > max_m or x.k > max_k:
        raise CapExceeded(f"closure oracle limited to m <= {max_m}, k <= {max_k}")
    if n < 1:
        raise InputError("n must be >= 1")
    members = set(x)
    return all(atom <= members or not (atom & members) for atom in _oracle_atoms(s, x.k, n))


def oracle_atom_partition(s: FiniteStructure, k: int, n: int) -> list[frozenset]:
    if s.m > ORACLE_MAX_M or k > ORACLE_MAX_K:
        raise CapExceeded(f"closure oracle limited to m <= {ORACLE_MAX_M}, k <= {ORACLE_MAX_K}")
    return list(_oracle_atoms(s, k, n))


# ---------------------------------------------------------- constantizable


def diagonal_distance(x: Relation) -> int:
    """Fewest tuples to add or remove to turn ``x`` into a union of equality-pattern classes."""
    cls = equality_patterns(x.m, x.k)
    inside = np.bincount(cls.labels, weights=x.bits, minlength=cls.count).astype(np.int64)
    total = np.bincount(cls.labels, minlength=cls.count)
    return int(np.minimum(inside, total - inside).sum())


def constantizable_within(s: FiniteStructure, x: Relation, budget: int) -> bool:
    """``x`` is within ``budget`` tuples of a Boolean combination of ``x_i = x_j``.

    Finitely many exceptional solutions become point equalities ``x = c`` in
    an expansion by constants; at finite scale the budget bounds how many.
    """
    if budget < 0:
        raise InputError("budget must be >= 0")
    _require_definable(s, x)
    return diagonal_distance(x) <= budget
