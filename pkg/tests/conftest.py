import os

from hypothesis import HealthCheck, settings
import numpy as np
import pytest

from prodfw.polytope import VPolytope

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def segment():
    return VPolytope([[0.0], [1.0]])


@pytest.fixture
def square():
    return VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def triangle():
    return VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def cube():
    return VPolytope([[i, j, k] for i in (0.0, 1.0) for j in (0.0, 1.0) for k in (0.0, 1.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
