import itertools

import pytest

from finarity.arity import formula_arity, is_nary, qe_check, theory_arity
from finarity.combinators import project
from finarity.errors import InputError
from finarity.formula import holds, parse
from finarity.generators import (
    bundled_fixtures_dir, check_axioms, corpus, cyclic_order, full_projection_witness, load_corpus,
    n_ball_order, nball_axioms, paper_example_R, pure_set, random_invariant_relation, successor_cycle,
)
from finarity.structure import FiniteStructure
from finarity.symmetry import is_definable


def between(a, b, c, m):
    """Forward from a, b is met no later than c; any repeat qualifies."""
    if len({a, b, c}) < 3:
        return True
    return (b - a) % m < (c - a) % m


@pytest.mark.parametrize("m", range(3, 8))
def test_cyclic_order_matches_betweenness(m):
    k3 = cyclic_order(m)["K3"]
    assert set(k3) == {t for t in itertools.product(range(m), repeat=3) if between(*t, m)}
    assert check_axioms(cyclic_order(m), "circular").passed


def test_cyclic5_size():
    k3 = cyclic_order(5)["K3"]
    assert len(k3) == 95
    assert sum(len(set(t)) == 3 for t in k3) == 30


def test_pure_and_successor():
    assert theory_arity(pure_set(1)).arity == 1
    assert theory_arity(pure_set(4)).arity == 1
    with pytest.raises(InputError):
        pure_set(0)
    assert len(successor_cycle(3)["S"]) == 3
    assert theory_arity(successor_cycle(4)).arity == 2
    assert not qe_check(successor_cycle(6))
    with pytest.raises(InputError):
        successor_cycle(2)


def test_listed_example():
    s = paper_example_R()
    assert s.elements == ("a", "b", "c", "d") and len(s["R"]) == 12


def test_nball_reports():
    with pytest.raises(InputError):
        n_ball_order(3, 4)
    for m in (4, 5, 6):
        s, rep = n_ball_order(m, 4)
        assert [r.name for r in rep.results] == [name for name, _, _ in nball_axioms(4)]
        for r in rep.results:
            if not r.holds:
                body = dict((n, b) for n, b, _ in nball_axioms(4))[r.name]
                assert not holds(parse(body), s, r.counterexample)
        if rep.passed:
            assert formula_arity(s, s["K4"]) == 4


def test_nball_first_axiom_holds_for_gap_sum():
    s, rep = n_ball_order(5, 4)
    assert next(r for r in rep.results if r.name == "nbo1").holds


def test_check_axioms_errors():
    with pytest.raises(InputError):
        check_axioms(pure_set(3), "circular")
    with pytest.raises(InputError):
        check_axioms(cyclic_order(3), "spherical")


def test_random_invariant_relation():
    s = pure_set(3)
    seen = {random_invariant_relation(s, 2, seed) for seed in range(50)}
    assert len(seen) == 4
    for seed in range(20):
        x = random_invariant_relation(cyclic_order(4), 3, seed)
        assert is_definable(cyclic_order(4), x)
        assert x == random_invariant_relation(cyclic_order(4), 3, seed)


def test_full_projection_witness():
    assert full_projection_witness(pure_set(3), 2, 2) is None
    # equality patterns already separate the orbits, so nothing qualifies
    assert full_projection_witness(pure_set(2), 3, 2) is None
    s = FiniteStructure("alt4", 4, corpus()["alt4"].relations, corpus()["alt4"].elements)
    x = full_projection_witness(s, 3, 2)
    assert x is not None
    for sub in itertools.combinations(range(3), 2):
        assert project(x, sub).is_full()
    assert not is_nary(s, x, 2)


def test_fixtures_match_generators():
    assert load_corpus() == corpus()
    assert sorted(p.stem for p in bundled_fixtures_dir().glob("*.json")) == sorted(corpus())
