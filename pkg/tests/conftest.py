import numpy as np
import pytest

from ising_interfaces.interface import cells_to_plus, flat_interface
from ising_interfaces.lattice import Box


@pytest.fixture
def box():
    return Box(4, 4, 4)


@pytest.fixture
def flat(box):
    return flat_interface(box)


@pytest.fixture
def bump(box):
    return cells_to_plus(flat_interface(box), [(1, 1, 1)])


def column(box, x, h):
    """Flat interface plus a straight column of h cells above base face x."""
    return cells_to_plus(flat_interface(box), [(x[0], x[1], 2 * k + 1) for k in range(h)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
