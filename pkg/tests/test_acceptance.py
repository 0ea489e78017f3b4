"""One test per acceptance criterion, each asserted exactly as stated.

Every run records a PASS/FAIL line per criterion; the lines are printed in
the terminal summary (see conftest.py) whether or not the criterion holds.
"""

import pytest

from finarity.generators import load_corpus
from finarity.verify import CHECKS, run_check

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="module")
def fixtures():
    return load_corpus()


@pytest.mark.parametrize("check", CHECKS, ids=[c.id for c in CHECKS])
def test_criterion(check, fixtures):
    result = run_check(check, fixtures)
    in_budget = result.seconds <= check.budget_s
    ok = result.passed and in_budget
    line = f"{'PASS' if ok else 'FAIL'} {check.id} {check.title} ({result.seconds:.2f} s of {check.budget_s:g} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    failures = [text for good, text in result.lines if not good]
    assert result.passed, f"{check.id}: " + "; ".join(failures)
    assert in_budget, f"{check.id} took {result.seconds:.2f} s, budget {check.budget_s:g} s"
