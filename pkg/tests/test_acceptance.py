"""The eleven acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion prints one PASS/FAIL line (shown even under output capture).
"""
import pytest

from wada_lab.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f.__name__ for f in CRITERIA])
def test_criterion(criterion, capsys):
    chk = criterion()
    with capsys.disabled():
        print("\n" + chk.line())
    assert chk.passed, "; ".join(chk.failures)
