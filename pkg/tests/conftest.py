import numpy as np
import pytest

from rss_locate import PathLossParams


@pytest.fixture
def default_params():
    return PathLossParams(p0_db=-30.0, beta=2.5, sigma_db=5.0)


@pytest.fixture
def square_sensors():
    return np.array([[40.0, 40.0], [-40.0, 40.0], [-40.0, -40.0], [40.0, -40.0]])


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {line}")
