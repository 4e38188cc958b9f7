import sys

import pytest

from mincenter import symbolic
from mincenter.partition import BoxPartition
from mincenter.systems import GOLDEN, full_shift, linear_contraction, rotation, sample_orbit


@pytest.fixture(scope="session")
def rotation_orbit_1e6():
    return sample_orbit(rotation(GOLDEN), 0.0, horizon=10**6)


@pytest.fixture(scope="session")
def rotation_orbit():
    return sample_orbit(rotation(GOLDEN), 0.0, horizon=10**5)


@pytest.fixture(scope="session")
def contraction_orbit():
    return sample_orbit(linear_contraction(0.5), 1.0, horizon=10**4)


@pytest.fixture(scope="session")
def circle64():
    return BoxPartition.circle(64)


@pytest.fixture(scope="session")
def interval65():
    # 0 is the centre of cell 32
    return BoxPartition.interval(-1.0, 1.0, 65)


@pytest.fixture(scope="session")
def shift_orbit():
    return sample_orbit(full_shift(), symbolic.parse_point("110(01)"), horizon=10**4)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for n, m in sys.modules.items() if n.split(".")[-1] == "test_acceptance"), None)
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
