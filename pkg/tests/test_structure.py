import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from finarity.errors import ArityMismatch, ElementOutOfRange, InputError, ParseError
from finarity.generators import paper_example_R, pure_set
from finarity.serialize import dumps_json, load_structure, loads_json, save_structure
from finarity.structure import FiniteStructure, Relation, relation_from_tuples


def relations(max_m=3, max_k=3):
    @st.composite
    def build(draw):
        m = draw(st.integers(1, max_m))
        k = draw(st.integers(0, max_k))
        bits = draw(st.lists(st.booleans(), min_size=m**k, max_size=m**k))
        return Relation(m, k, bits)

    return build()


@st.composite
def relation_triples(draw):
    m = draw(st.integers(1, 3))
    k = draw(st.integers(0, 3))
    rel = lambda: Relation(m, k, draw(st.lists(st.booleans(), min_size=m**k, max_size=m**k)))
    return rel(), rel(), rel()


@st.composite
def structures(draw, max_m=5):
    m = draw(st.integers(1, max_m))
    rels = {}
    for i in range(draw(st.integers(0, 3))):
        k = draw(st.integers(0, 3))
        rels[f"Q{i}"] = Relation(m, k, draw(st.lists(st.booleans(), min_size=m**k, max_size=m**k)))
    return FiniteStructure("h", m, rels)


def test_from_tuples_counts_distinct_tuples():
    assert len(relation_from_tuples(2, [(0, 1), (1, 0)], 2)) == 2
    assert len(relation_from_tuples(2, [(0, 1), (0, 1)], 2)) == 1


def test_listed_triples_build_r():
    r = paper_example_R()["R"]
    assert len(r) == 12
    assert (0, 1, 2) in r and (1, 0, 3) in r and (1, 2, 3) in r
    assert (0, 1, 3) not in r


def test_tuples_are_lexicographic():
    r = Relation.from_tuples(3, 2, [(2, 0), (0, 2), (1, 1)])
    assert r.tuples() == [(0, 2), (1, 1), (2, 0)]


def test_out_of_range_element():
    with pytest.raises(ElementOutOfRange):
        load_structure('{"name": "x", "universe": 3, "relations": {"E": {"arity": 2, "tuples": [[0, 5]]}}}')


def test_wrong_tuple_length():
    with pytest.raises(ArityMismatch):
        Relation.from_tuples(3, 2, [(0, 1, 2)])


def test_pure_set_from_json():
    s = load_structure('{"name": "p", "universe": 3, "relations": {}}')
    assert s.m == 3 and not s.relations


def test_named_universe_and_names_in_tuples():
    text = '{"name": "t", "universe": ["a", "b"], "relations": {"E": {"arity": 2, "tuples": [["a", "b"], [1, 0]]}}}'
    s = load_structure(text)
    assert s.elements == ("a", "b")
    assert s["E"].tuples() == [(0, 1), (1, 0)]


def test_json_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        loads_json('{"universe": 3,\n  "relations": }')
    assert err.value.line == 2


def test_dsl_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        load_structure("structure x;\nuniverse 3;\nrelation E/2 { (0,1 }", "dsl")
    assert err.value.line == 3


def test_schema_rejects_unknown_fields():
    with pytest.raises(InputError):
        load_structure('{"name": "x", "universe": 3, "relations": {}, "colour": 1}')


def test_json_is_stable_text():
    s = paper_example_R()
    assert dumps_json(s) == dumps_json(load_structure(dumps_json(s)))
    json.loads(dumps_json(s))


@pytest.mark.parametrize("fmt", ["json", "dsl"])
def test_round_trip_examples(fmt):
    two = FiniteStructure("two", 3, {
        "P": Relation.from_tuples(3, 1, [(2,)]),
        "T": Relation.from_tuples(3, 3, [(0, 1, 2), (2, 2, 2)]),
    })
    for s in (pure_set(1), paper_example_R(), two):
        back = load_structure(save_structure(s, fmt), fmt)
        assert back == s
        assert save_structure(back, fmt) == save_structure(s, fmt)


@given(structures(), st.sampled_from(["json", "dsl"]))
def test_round_trip_property(s, fmt):
    assert load_structure(save_structure(s, fmt), fmt) == s


@given(relation_triples())
def test_boolean_laws(xyz):
    x, y, z = xyz
    assert ~~x == x
    assert ~(x & y) == ~x | ~y
    assert ~(x | y) == ~x & ~y
    assert x & (y | z) == (x & y) | (x & z)
    assert x | (y & z) == (x | y) & (x | z)
    assert x - y == x & ~y
    assert (x ^ y) == (x - y) | (y - x)
    assert (x & y) <= x <= (x | y)


@given(relations())
def test_membership_matches_bits(x):
    members = set(x)
    assert len(members) == len(x)
    for t in itertools.product(range(x.m), repeat=x.k):
        assert (t in x) == (t in members)


def test_mismatched_shapes_rejected():
    with pytest.raises(ArityMismatch):
        Relation.full(2, 2) & Relation.full(3, 2)


def test_relations_hash_by_content():
    a = Relation.from_tuples(2, 2, [(0, 1)])
    b = Relation(2, 2, np.array([False, True, False, False]))
    assert a == b and hash(a) == hash(b)


def test_universe_must_be_positive():
    with pytest.raises(InputError):
        FiniteStructure("z", 0)
