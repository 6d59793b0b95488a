import math

import pytest

from lsbound.weights import make_density, make_kernel


@pytest.fixture(scope="session")
def box():
    return make_kernel("box", 1, 0.0)


@pytest.fixture(scope="session")
def uniform():
    return make_density("uniform")


@pytest.fixture(scope="session")
def box_w(box):
    """n^-1 K_h for the plain box, h = 0.1, n = 100, 1024 nodes per h."""
    return box.tabulate(0.1 / 1024, 0.1, 100)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


LN2 = math.log(2.0)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
