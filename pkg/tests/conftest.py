import numpy as np
import pytest

from hitchin_glue.toda import SolverConfig, solve_toda

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def config():
    return SolverConfig()


@pytest.fixture(scope="session")
def toda(config):
    """Converged solutions for K = 2..5 on the default grid."""
    return {K: solve_toda(K, config) for K in (2, 3, 4, 5)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
