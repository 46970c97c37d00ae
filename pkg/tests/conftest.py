import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from minkval.geomcore import Polytope

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def cube_points():
    return np.array(list(itertools.product([0.0, 1.0], repeat=3)))


@pytest.fixture
def cube():
    return Polytope(cube_points())


@pytest.fixture
def simplex():
    return Polytope(np.vstack([np.zeros(3), np.eye(3)]))


@pytest.fixture
def cube4():
    return Polytope(np.array(list(itertools.product([0.0, 1.0], repeat=4))))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
