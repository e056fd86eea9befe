import numpy as np
import pytest

from repdiag.recur import generate_transcript


@pytest.fixture(scope="session")
def tr5():
    return generate_transcript(5)


@pytest.fixture(scope="session")
def tr6():
    return generate_transcript(6)


@pytest.fixture(scope="session")
def tr7():
    return generate_transcript(7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
