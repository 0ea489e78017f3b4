import itertools
import random

import pytest
from hypothesis import given, strategies as st

from finarity.arity import theory_arity
from finarity.combinators import (
    CoordinateMap, binarization_bounds, binarize, cartesian_product, cartesian_sum, compose, cylindrify,
    disjoint_union, e_definable_check, expand_with, mixed_product, mixed_sum, project, unarize,
)
from finarity.errors import InputError, NameClash
from finarity.formula import evaluate
from finarity.generators import corpus, cyclic_order, paper_example_R, pure_set, successor_cycle
from finarity.structure import FiniteStructure, Relation
from finarity.symmetry import automorphisms
from test_structure import relations

CORPUS = corpus()


def test_cylinder_examples():
    c = cylindrify(Relation.diagonal(2, 2), CoordinateMap(3, (0, 2)))
    assert c.tuples() == [(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)]
    assert cylindrify(Relation.full(3, 1), CoordinateMap(2, (0,))) == Relation.full(3, 2)
    proj = project(paper_example_R()["R"], (0, 1))
    assert cylindrify(proj, CoordinateMap(3, (0, 1))).k == 3
    assert project(cylindrify(proj, CoordinateMap(3, (0, 1))), (0, 1)) == proj


def test_projection_examples():
    r = paper_example_R()["R"]
    distinct = Relation(4, 2, [a != b for a, b in itertools.product(range(4), repeat=2)])
    assert project(r, (0, 1)) == distinct
    assert project(Relation.empty(3, 3), (1,)).is_empty()
    with pytest.raises(InputError):
        project(r, (1, 0))
    with pytest.raises(InputError):
        project(r, ())


def test_product_and_sum_example():
    x, y = Relation.from_tuples(2, 1, [(0,)]), Relation.from_tuples(2, 1, [(1,)])
    assert cartesian_product(x, y).tuples() == [(0, 1)]
    assert cartesian_sum(x, y).tuples() == [(0, 0), (0, 1), (1, 1)]


def test_mixed_examples():
    d = Relation.diagonal(2, 2)
    assert mixed_product(d, "ab", d, "bc").tuples() == [(0, 0, 0), (1, 1, 1)]
    s = mixed_sum(d, "ab", d, "bc")
    assert set(s) == {t for t in itertools.product(range(2), repeat=3) if t[0] == t[1] or t[1] == t[2]}


@given(st.integers(0, 10**6))
def test_mixed_agree_with_formulas(seed):
    rng = random.Random(seed)
    m = rng.randrange(1, 4)
    X = Relation(m, 2, [rng.random() < 0.5 for _ in range(m * m)])
    Y = Relation(m, 2, [rng.random() < 0.5 for _ in range(m * m)])
    s = FiniteStructure("xy", m, {"X": X, "Y": Y})
    xv, yv = rng.sample("uvw", 2), rng.sample("uvw", 2)
    target = sorted(set(xv) | set(yv))
    fx, fy = f"X({xv[0]},{xv[1]})", f"Y({yv[0]},{yv[1]})"
    assert mixed_product(X, xv, Y, yv, target) == evaluate(f"{fx} & {fy}", s, target)
    assert mixed_sum(X, xv, Y, yv, target) == evaluate(f"{fx} | {fy}", s, target)


def test_project_cylindrify_identity_exhaustive():
    for m in (1, 2):
        for k in (1, 2):
            for mask in range(1 << m**k):
                x = Relation(m, k, [(mask >> i) & 1 for i in range(m**k)])
                for target in range(k, 4):
                    for pos in itertools.combinations(range(target), k):
                        assert project(cylindrify(x, CoordinateMap(target, pos)), pos) == x


@given(relations(max_m=4, max_k=3), st.integers(0, 2), st.data())
def test_project_cylindrify_identity(x, extra, data):
    if x.k == 0:
        return
    target = x.k + extra
    pos = tuple(sorted(data.draw(st.lists(st.integers(0, target - 1), min_size=x.k, max_size=x.k, unique=True))))
    assert project(cylindrify(x, CoordinateMap(target, pos)), pos) == x


def test_union_examples():
    du = disjoint_union([pure_set(2), pure_set(3)])
    s = du.structure
    assert s.m == 5 and [len(s[p]) for p in du.part_predicates] == [2, 3]
    single = disjoint_union([cyclic_order(3)])
    assert set(single.structure.relations) == {"K3", "P0"}
    assert theory_arity(single.structure).arity == theory_arity(cyclic_order(3)).arity


def test_union_renames_shared_symbols():
    du = disjoint_union([cyclic_order(3), cyclic_order(4)])
    assert du.renamed == {"0:K3": "cyclic3_K3", "1:K3": "cyclic4_K3"}
    assert len(du.structure["cyclic4_K3"]) == len(cyclic_order(4)["K3"])


UNION_PAIRS = [
    (a, b) for a, b in itertools.combinations_with_replacement(sorted(CORPUS), 2)
    if CORPUS[a].m + CORPUS[b].m <= 6
]


@pytest.mark.parametrize("a,b", UNION_PAIRS)
def test_union_arity_is_max(a, b):
    sa, sb = CORPUS[a], CORPUS[b]
    u = disjoint_union([sa, sb]).structure
    assert theory_arity(u).arity == max(theory_arity(sa).arity, theory_arity(sb).arity)


def test_composition_examples():
    c = compose(pure_set(2), pure_set(2))
    assert c.structure.m == 4 and not c.structure.relations
    assert not e_definable_check(c.structure, 2)
    c = compose(cyclic_order(3), pure_set(2))
    assert e_definable_check(c.structure, 2)
    k3, lifted = cyclic_order(3)["K3"], c.structure["K3"]
    for t in itertools.product(range(6), repeat=3):
        assert (t in lifted) == (tuple(a // 2 for a in t) in k3)
    for outer in (cyclic_order(3), successor_cycle(4), pure_set(3)):
        assert e_definable_check(compose(outer, pure_set(1)).structure, 1)


def test_shared_symbol_composition():
    e1 = FiniteStructure("a", 2, {"E2": Relation.from_tuples(2, 2, [(0, 1)])})
    e2 = FiniteStructure("b", 3, {"E2": Relation.from_tuples(3, 2, [(1, 2)])})
    c = compose(e1, e2)
    rel = c.structure["E2"]
    for (a1, b1), (a2, b2) in itertools.product(itertools.product(range(2), range(3)), repeat=2):
        want = (a1, a2) in e1["E2"] or (a1 == a2 and (b1, b2) in e2["E2"])
        assert ((a1 * 3 + b1, a2 * 3 + b2) in rel) == want


COMPOSE_PAIRS = [("cyclic3", "pure2"), ("succ3", "pure2"), ("pure2", "cyclic3"), ("equiv22", "pure1"), ("cyclic3", "pure1")]


@pytest.mark.parametrize("outer,inner", COMPOSE_PAIRS)
def test_composition_arity_law(outer, inner):
    so, si = CORPUS[outer], CORPUS[inner]
    c = compose(so, si)
    assert c.structure.m == so.m * si.m
    assert e_definable_check(c.structure, si.m)
    parts = [theory_arity(so).arity, theory_arity(si).arity]
    if min(so.m, si.m) == 1:
        parts.append(2)
    assert theory_arity(c.structure).arity == max(parts)


def test_singleton_outer_with_pure_inner_stays_unary():
    c = compose(pure_set(1), pure_set(2))
    assert e_definable_check(c.structure, 2)
    assert theory_arity(c.structure).arity == 1


@pytest.mark.parametrize("name", [n for n, s in CORPUS.items() if s.m <= 5])
def test_expansions(name):
    s = CORPUS[name]
    u = unarize(s)
    assert automorphisms(u).is_trivial()
    assert theory_arity(u).arity == 1
    assert theory_arity(binarize(s)).arity <= 2
    bounds = binarization_bounds(s)
    assert bounds["basis_bound"] == 2 and bounds["semantic_arity"] == 1 and bounds["rigid"]


def test_expand_with():
    p4 = pure_set(4)
    assert theory_arity(expand_with(p4, "K3", cyclic_order(4)["K3"])).arity == 2
    with pytest.raises(NameClash):
        expand_with(cyclic_order(4), "K3", cyclic_order(4)["K3"])
    assert theory_arity(unarize(paper_example_R())).arity == 1
