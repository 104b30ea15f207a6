"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import pytest

from radeuler.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
