
import pytest
from hypothesis import given, strategies as st

from finarity.arity import (
    ba_atoms, closure_oracle, constantizable_within, fingerprint, formula_arity, is_nary,
    n_transitive, nary_witness, qe_check, theory_arity, transitivity_profile, verify_witness,
)
from finarity.errors import NotDefinable
from finarity.generators import (
    alternating_orientation, corpus, cyclic_order, paper_example_R, pure_set, random_invariant_relation,
    successor_cycle,
)
from finarity.structure import Relation
from finarity.symmetry import orbit_partition
from test_structure import structures

SMALL = [s for s in corpus().values() if s.m <= 4]


def oracle_theory_arity(s):
    """Least n such that every orbit of M^k, k <= m, is n-ary by the brute-force closure."""
    for n in range(1, s.m + 1):
        if all(
            closure_oracle(s, orbit, n, max_k=s.m)
            for k in range(n + 1, s.m + 1)
            for orbit in orbit_partition(s, k).orbits()
        ):
            return n
    return s.m


def test_nary_examples():
    alt = alternating_orientation()
    w = nary_witness(alt, alt["R"], 2)
    assert w is not None
    verify_witness(alt, alt["R"], w)
    assert is_nary(alt, alt["R"], 3)
    assert is_nary(pure_set(4), Relation.diagonal(4, 2), 1)


def test_cyclic_order_is_binary_at_finite_size():
    # the rotation group is regular, so a pair already pins the orientation
    c5 = cyclic_order(5)
    assert is_nary(c5, c5["K3"], 2) and not is_nary(c5, c5["K3"], 1)
    c4 = cyclic_order(4)
    assert closure_oracle(c4, c4["K3"], 2) and not closure_oracle(c4, c4["K3"], 1)


def test_formula_arity_examples():
    assert formula_arity(pure_set(3), Relation.full(3, 3)) == 0
    assert formula_arity(alternating_orientation(), alternating_orientation()["R"]) == 3
    assert formula_arity(paper_example_R(), paper_example_R()["R"]) == 2
    with pytest.raises(NotDefinable):
        formula_arity(pure_set(3), Relation.from_tuples(3, 1, [(0,)]))


def test_theory_arity_examples():
    assert theory_arity(pure_set(4)).arity == 1
    assert theory_arity(successor_cycle(4)).arity == 2
    assert theory_arity(alternating_orientation()).arity == 3
    assert theory_arity(paper_example_R()).arity == 2


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_theory_arity_matches_oracle(s):
    assert theory_arity(s).arity == oracle_theory_arity(s)


def test_report_witnesses_are_genuine():
    for s in SMALL:
        rep = theory_arity(s)
        assert [w.n for w in rep.witnesses] == list(range(1, rep.arity))
        for w in rep.witnesses:
            assert fingerprint(s, w.first, w.n) == fingerprint(s, w.second, w.n)
            assert orbit_partition(s, len(w.first)).orbit_of(w.first) != orbit_partition(s, len(w.first)).orbit_of(w.second)


def test_transitivity_examples():
    alt = alternating_orientation()
    assert n_transitive(alt, 2) and not n_transitive(alt, 3)
    assert transitivity_profile(alt).flags == {1: True, 2: True, 3: False, 4: False}
    assert all(n_transitive(pure_set(4), n) for n in range(5))
    assert transitivity_profile(pure_set(3)).flags == {1: True, 2: True, 3: True}
    c5 = cyclic_order(5)
    assert n_transitive(c5, 1) and not n_transitive(c5, 2)
    assert transitivity_profile(cyclic_order(4)).degree == 1


def test_qe_examples():
    assert qe_check(alternating_orientation())
    assert qe_check(pure_set(3))
    res = qe_check(successor_cycle(6))
    assert not res and res.k == 2
    assert not qe_check(paper_example_R())


def test_ba_examples():
    b = ba_atoms(pure_set(3), 2, 1)
    assert b.count == 2 and b.algebra_size == 4
    b = ba_atoms(alternating_orientation(), 3, 2)
    assert b.count < b.orbit_count
    for s in SMALL:
        for k in range(1, 4):
            assert ba_atoms(s, k, k).count == orbit_partition(s, k).count


def test_oracle_examples():
    assert closure_oracle(pure_set(3), Relation.diagonal(3, 2), 1)
    alt = alternating_orientation()
    assert not closure_oracle(alt, alt["R"], 2)


def test_oracle_agrees_on_seeded_relations_m3():
    for s in (cyclic_order(3), successor_cycle(3), pure_set(3)):
        for seed in range(100):
            x = random_invariant_relation(s, 3, seed)
            assert is_nary(s, x, 2) == closure_oracle(s, x, 2)


def test_constantizable_examples():
    assert constantizable_within(pure_set(3), Relation.diagonal(3, 2), 0)
    assert constantizable_within(pure_set(3), Relation.full(3, 2), 0)
    c5 = cyclic_order(5)
    assert not constantizable_within(c5, c5["K3"], 3)


@given(st.sampled_from(SMALL), st.integers(1, 3), st.integers(0, 10**6))
def test_arity_is_monotone_in_n(s, k, seed):
    x = random_invariant_relation(s, k, seed)
    flags = [is_nary(s, x, n) for n in range(1, k + 2)]
    assert flags == sorted(flags)
    assert flags[-1]


@given(st.sampled_from(SMALL), st.integers(1, 3), st.integers(1, 2), st.integers(0, 10**6))
def test_nary_sets_form_a_boolean_algebra(s, k, n, seed):
    b = ba_atoms(s, k, n)
    xs = [
        Relation(s.m, k, [b.labels[i] in chosen for i in range(s.m**k)])
        for chosen in ({c for c in range(b.count) if (seed >> c) & 1}, {c for c in range(b.count) if (seed >> (c + 3)) & 1})
    ]
    x, y = xs
    for z in (x, y, ~x, x & y, x | y, x - y):
        assert is_nary(s, z, n)


@given(structures(max_m=4), st.permutations(range(4)))
def test_arity_is_isomorphism_invariant(s, perm):
    perm = [p for p in perm if p < s.m]
    t = s.permuted(perm)
    assert theory_arity(t).arity == theory_arity(s).arity
    assert qe_check(t).holds == qe_check(s).holds
    assert transitivity_profile(t).flags == transitivity_profile(s).flags


@given(structures(max_m=4))
def test_transitivity_bridge_and_ba_criterion(s):
    arity = theory_arity(s).arity
    flags = transitivity_profile(s).flags
    for n in range(1, s.m):
        if flags[n] and not flags[n + 1]:
            assert arity >= n + 1
        assert (arity <= n) == all(ba_atoms(s, k, n).is_full for k in range(n + 1, s.m + 1))


def test_qe_implies_arity_at_most_signature_arity():
    for s in corpus().values():
        if qe_check(s):
            top = max([r.k for r in s.relations.values()] + [1])
            assert theory_arity(s).arity <= top
