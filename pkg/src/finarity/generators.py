"""Concrete structures, order-axiom checking and property-test fuel."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import CapExceeded, InputError
from .formula import evaluate, free_vars, holds, parse, universal_closure
from .structure import FiniteStructure, Relation, check_size, coordinates, decode
from .symmetry import orbit_partition

MAX_GENERATED = 8


def _gap(a, b, m):
    return (b - a) % m


def pure_set(m: int) -> FiniteStructure:
    if not 1 <= m <= MAX_GENERATED:
        raise InputError(f"pure_set needs 1 <= m <= {MAX_GENERATED}, got {m}")
    return FiniteStructure(f"pure{m}", m)


def successor_cycle(m: int) -> FiniteStructure:
    """The graph of ``i -> i+1 mod m`` as a binary relation ``S``."""
    if m < 3:
        raise InputError(f"successor_cycle needs m >= 3, got {m}")
    return FiniteStructure(f"succ{m}", m, {"S": Relation.from_tuples(m, 2, [(i, (i + 1) % m) for i in range(m)])})


def _gap_sum_relation(m: int, n: int) -> Relation:
    """Tuples whose consecutive forward gaps sum to at most one full turn."""
    cols = coordinates(m, n)
    total = np.zeros(m**n, dtype=np.int64)
    for a, b in zip(cols, cols[1:]):
        total += _gap(a.astype(np.int64), b.astype(np.int64), m)
    return Relation(m, n, total <= m)


def cyclic_order(m: int) -> FiniteStructure:
    """Circular order ``K3`` on ``Z_m``: a nondecreasing walk of at most one turn.

    A triple with a repeated element always qualifies (``(x, y, x)`` sums to
    exactly ``m``), which the symmetry and totality axioms require.
    """
    if m < 3:
        raise InputError(f"cyclic_order needs m >= 3, got {m}")
    return FiniteStructure(f"cyclic{m}", m, {"K3": _gap_sum_relation(m, 3)})


PAPER_TRIPLES = (
    ("a", "b", "c"), ("b", "a", "d"), ("b", "c", "d"), ("c", "b", "a"),
    ("a", "c", "d"), ("c", "a", "b"), ("c", "d", "a"), ("d", "c", "b"),
    ("d", "a", "b"), ("a", "d", "c"), ("b", "d", "a"), ("d", "b", "c"),
)


def paper_example_R() -> FiniteStructure:
    """The four-element ternary example, exactly as listed (a, b, c, d -> 0, 1, 2, 3)."""
    idx = {e: i for i, e in enumerate("abcd")}
    rel = Relation.from_tuples(4, 3, [tuple(idx[e] for e in t) for t in PAPER_TRIPLES])
    return FiniteStructure("paper_R", 4, {"R": rel}, ("a", "b", "c", "d"))


def alternating_orientation() -> FiniteStructure:
    """Distinct triples (x, y, z) whose completion (x, y, z, w) is an even permutation of 0123.

    Aut is A4: 2-transitive, not 3-transitive, ternary, with quantifier elimination.
    """
    def even(p):
        return sum(p[i] > p[j] for i, j in itertools.combinations(range(4), 2)) % 2 == 0

    triples = [t for t in itertools.permutations(range(4), 3) if even(t + tuple(set(range(4)) - set(t)))]
    return FiniteStructure("alt4", 4, {"R": Relation.from_tuples(4, 3, triples)}, ("a", "b", "c", "d"))


def equivalence(classes: Iterable[int]) -> FiniteStructure:
    """An equivalence relation ``E`` with blocks of the given sizes."""
    sizes = list(classes)
    block = [i for i, s in enumerate(sizes) for _ in range(s)]
    m = len(block)
    pairs = [(a, b) for a in range(m) for b in range(m) if block[a] == block[b]]
    return FiniteStructure("equiv" + "".join(map(str, sizes)), m, {"E": Relation.from_tuples(m, 2, pairs)})


def pointed_set(m: int) -> FiniteStructure:
    """A set with one distinguished element marked by the unary ``P``."""
    return FiniteStructure(f"pointed{m}", m, {"P": Relation.from_tuples(m, 1, [(0,)])})


def linear_order(m: int) -> FiniteStructure:
    return FiniteStructure(f"linear{m}", m, {"L": Relation.from_tuples(m, 2, [(i, j) for i in range(m) for j in range(m) if i < j])})


def corpus() -> dict[str, FiniteStructure]:
    """The bundled structures, keyed by name."""
    items = [
        pure_set(1), pure_set(2), pure_set(3), pure_set(4),
        successor_cycle(3), successor_cycle(4), successor_cycle(5),
        cyclic_order(3), cyclic_order(4), cyclic_order(5),
        paper_example_R(), alternating_orientation(),
        equivalence([2, 2]), pointed_set(3), linear_order(3),
    ]
    return {s.name: s for s in items}


def bundled_fixtures_dir() -> Path:
    return Path(str(resources.files("finarity").joinpath("data")))


def load_corpus(directory: str | Path | None = None) -> dict[str, FiniteStructure]:
    """Read every ``*.json`` structure in ``directory`` (default: the bundled fixtures)."""
    from .serialize import read_structure

    directory = Path(directory) if directory is not None else bundled_fixtures_dir()
    out = {}
    for path in sorted(directory.glob("*.json")):
        s = read_structure(path)
        out[s.name] = s
    return out


# ------------------------------------------------------------------ axioms


@dataclass(frozen=True)
class AxiomResult:
    name: str
    text: str
    holds: bool
    counterexample: dict[str, int] | None = None

    def to_json(self) -> dict:
        return {"axiom": self.name, "formula": self.text, "holds": self.holds, "counterexample": self.counterexample}


@dataclass(frozen=True)
class AxiomReport:
    structure: str
    family: str
    relation: str
    results: tuple[AxiomResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.results)

    def failures(self) -> list[str]:
        return [r.name for r in self.results if not r.holds]

    def to_json(self) -> dict:
        return {
            "structure": self.structure,
            "family": self.family,
            "relation": self.relation,
            "passed": self.passed,
            "axioms": [r.to_json() for r in self.results],
        }


def circular_axioms(rel: str = "K3") -> list[tuple[str, str, list[str]]]:
    """(name, body, universally quantified variables)."""
    v = ["x", "y", "z"]
    return [
        ("co1", f"{rel}(x,y,z) -> {rel}(y,z,x)", v),
        ("co2", f"{rel}(x,y,z) & {rel}(y,x,z) <-> x = y | y = z | z = x", v),
        ("co3", f"{rel}(x,y,z) -> forall t . ({rel}(x,y,t) | {rel}(t,y,z))", v),
        ("co4", f"{rel}(x,y,z) | {rel}(y,x,z)", v),
    ]


def nball_axioms(n: int, rel: str | None = None) -> list[tuple[str, str, list[str]]]:
    """The n-ball order axioms; index-dependent ones are expanded to one axiom per i < n.

    In the swap-symmetry axiom the disjunction of adjacent equalities ranges
    over all j = 1..n-1 for each fixed swap position i.
    """
    rel = rel or f"K{n}"
    xs = [f"x{i}" for i in range(1, n + 1)]

    def atom(args):
        return f"{rel}({','.join(args)})"

    def swapped(i):
        ys = list(xs)
        ys[i - 1], ys[i] = ys[i], ys[i - 1]
        return ys

    any_adjacent_equal = " | ".join(f"{xs[j]} = {xs[j + 1]}" for j in range(n - 1))
    out = [("nbo1", f"{atom(xs)} -> {atom(xs[1:] + xs[:1])}", xs)]
    for i in range(1, n):
        out.append((f"nbo2[i={i}]", f"{atom(xs)} & {atom(swapped(i))} <-> {any_adjacent_equal}", xs))
    out.append(("nbo3", f"{atom(xs)} -> forall t . ({atom(xs[:-1] + ['t'])} | {atom(['t'] + xs[1:])})", xs))
    for i in range(1, n):
        out.append((f"nbo4[i={i}]", f"{atom(xs)} | {atom(swapped(i))}", xs))
    return out


def _check_one(s: FiniteStructure, name: str, body_text: str, variables: list[str]) -> AxiomResult:
    body = parse(body_text)
    assert set(free_vars(body)) <= set(variables)
    sat = evaluate(body, s, variables)
    text = str(universal_closure(body, variables))
    if sat.is_full():
        return AxiomResult(name, text, True)
    bad = decode(int(np.flatnonzero(~sat.bits)[0]), s.m, len(variables))
    env = dict(zip(variables, bad))
    assert not holds(body, s, env), f"counterexample {env} to {name} does not falsify it"
    return AxiomResult(name, text, False, env)


def check_axioms(s: FiniteStructure, family: str, relation: str | None = None) -> AxiomReport:
    """Evaluate each axiom of ``family`` ('circular' or 'nball') on ``s``."""
    if family == "circular":
        relation = relation or "K3"
        want = 3
    elif family == "nball":
        if relation is None:
            candidates = [n for n, r in s.relations.items() if n.startswith("K") and r.k >= 4]
            if len(candidates) != 1:
                raise InputError(f"cannot pick the n-ball relation of {s.name}; pass relation=")
            relation = candidates[0]
        want = s.relations[relation].k if relation in s.relations else 4
    else:
        raise InputError(f"unknown axiom family {family!r}")
    if relation not in s.relations:
        raise InputError(f"structure {s.name} has no relation {relation}")
    if s.relations[relation].k != want:
        raise InputError(f"{relation} has arity {s.relations[relation].k}, expected {want}")
    axioms = circular_axioms(relation) if family == "circular" else nball_axioms(want, relation)
    results = tuple(_check_one(s, *ax) for ax in axioms)
    return AxiomReport(s.name, family, relation, results)


def n_ball_order(m: int, n: int) -> tuple[FiniteStructure, AxiomReport]:
    """Candidate n-ball order on ``Z_m`` (gap sum of at most one turn) and its axiom report.

    The construction is only a candidate; the report says whether it is one.
    """
    if n < 4 or m < n:
        raise InputError(f"n_ball_order needs m >= n >= 4, got m={m}, n={n}")
    if m > MAX_GENERATED:
        raise InputError(f"n_ball_order needs m <= {MAX_GENERATED}")
    check_size(m, n + 1)
    s = FiniteStructure(f"nball{m}_{n}", m, {f"K{n}": _gap_sum_relation(m, n)})
    return s, check_axioms(s, "nball", f"K{n}")


# ----------------------------------------------------------- test fuel


def random_invariant_relation(s: FiniteStructure, k: int, seed: int) -> Relation:
    """A union of Aut(s)-orbits on M^k, each orbit kept with probability 1/2."""
    op = orbit_partition(s, k)
    keep = np.random.default_rng(seed).random(op.count) < 0.5
    return Relation(s.m, k, keep[op.labels])


MAX_SEARCH_ORBITS = 22


def full_projection_witness(s: FiniteStructure, k: int, n: int) -> Relation | None:
    """First orbit union X ∉ {∅, M^k} (by orbit bitmask) whose every n-projection
    is all of M^n although X is not n-ary; None when no such X exists."""
    from .arity import fingerprint_partition, is_nary
    from .combinators import project

    if k <= n:
        return None
    op = orbit_partition(s, k)
    if op.count > MAX_SEARCH_ORBITS:
        raise CapExceeded(f"{op.count} orbits on M^{k}: search space 2^{op.count} is too large")
    subsets = list(itertools.combinations(range(k), n))
    full_proj = (1 << s.m**n) - 1
    orbit_proj = []
    for o in range(op.count):
        member = op.members(o)
        masks = []
        for sub in subsets:
            pbits = project(member, sub).bits
            masks.append(sum(1 << int(i) for i in np.flatnonzero(pbits)))
        orbit_proj.append(masks)
    fp = fingerprint_partition(s, k, n)
    class_masks: dict[int, int] = {}
    for o, rep in enumerate(op.representatives):
        c = fp.class_of(rep)
        class_masks[c] = class_masks.get(c, 0) | (1 << o)
    full = (1 << op.count) - 1
    for mask in range(1, full):
        if all((mask & cm) in (0, cm) for cm in class_masks.values()):
            continue
        ok = True
        for j in range(len(subsets)):
            acc = 0
            for o in range(op.count):
                if mask >> o & 1:
                    acc |= orbit_proj[o][j]
            if acc != full_proj:
                ok = False
                break
        if ok:
            x = op.union(o for o in range(op.count) if mask >> o & 1)
            assert all(project(x, sub).is_full() for sub in subsets)
            assert not is_nary(s, x, n)
            return x
    return None
