import numpy as np
import pytest


def random_sym(rng, k, scale=1.0):
    a = rng.normal(scale=scale, size=(k, k))
    return (a + a.T) / 2


@pytest.fixture
def nprng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
