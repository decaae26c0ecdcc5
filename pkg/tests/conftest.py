import os

import pytest
from hypothesis import settings

from wishart_edge.tracy_widom import default_table
from wishart_edge.validation import EdgeRuns

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repro"))

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def edge_runs():
    """Monte Carlo runs shared by the harness, kernel and acceptance tests (~2 min)."""
    return EdgeRuns.simulate(workers=1)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
