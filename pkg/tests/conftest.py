import itertools

import pytest
from hypothesis import HealthCheck, settings

from finarity.generators import corpus as build_corpus

settings.register_profile("finarity", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("finarity")


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


def brute_automorphisms(s):
    """Every permutation that maps each relation onto itself, by exhaustive filtering."""
    rels = [set(r) for r in s.relations.values()]
    return [
        p for p in itertools.permutations(range(s.m))
        if all({tuple(p[a] for a in t) for t in r} == r for r in rels)
    ]


def brute_orbits(s, k):
    """Orbits on M^k as a set of frozensets, from the brute-force group."""
    perms = brute_automorphisms(s)
    return {
        frozenset(tuple(p[a] for a in t) for p in perms)
        for t in itertools.product(range(s.m), repeat=k)
    }


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
