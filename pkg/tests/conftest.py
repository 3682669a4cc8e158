import numpy as np
import pytest

from fiscast.series import AnnualSeries


def series(values, start=2000, name="y"):
    return AnnualSeries(name, start, np.asarray(values, dtype=float))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
