"""Every acceptance criterion at its stated tolerance, one pass/fail line each."""

import pytest

from rdmass.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("name", list(CRITERIA), ids=lambda n: f"{CRITERIA[n][0]}-{n}")
def test_criterion(name, capsys):
    res = run_criterion(name)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
