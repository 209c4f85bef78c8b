"""Acceptance suite: one printed PASS/FAIL line per criterion."""

import pytest

import acceptance_checks as ac

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module", autouse=True)
def _compiled_oracle():
    ac.warm_up()


@pytest.mark.parametrize("check", ac.CRITERIA, ids=lambda c: f"criterion_{c.number}")
def test_acceptance(check, capsys):
    outcome = check()
    with capsys.disabled():
        print("\n" + outcome.line())
    assert outcome.ok, outcome.detail
    assert outcome.in_budget, f"{outcome.seconds:.1f}s exceeds the {outcome.budget:.0f}s budget"
