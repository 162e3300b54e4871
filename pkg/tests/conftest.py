import numpy as np
import pytest

from companion_gsp import decompose, random_corpus


@pytest.fixture(scope="session")
def corpus():
    """100 seeded random strongly connected digraphs, N <= 12, eigen-gap > 1e-3."""
    return [decompose(g) for g in random_corpus(100, seed=0)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
