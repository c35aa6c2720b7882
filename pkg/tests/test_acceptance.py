"""Acceptance criteria 1 to 12 at full size; each prints one PASS/FAIL line."""

import pytest

from ising_interfaces import verification

SEED = 1
LINES = {}


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, 13))
def test_criterion(number):
    [result] = verification.run("full", SEED, only=[number])
    LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.line()
