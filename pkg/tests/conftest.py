import math
import os

import pytest
from hypothesis import HealthCheck, settings

from outer_billiard.geometry import ellipse, polygon

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
PARALLELOGRAM = [(0, 0), (3, 0), (4, 1), (1, 1)]
QUAD = [(0, 0), (2, 0), (3, 2), (0, 1)]


@pytest.fixture
def square():
    return polygon(SQUARE)


@pytest.fixture
def square_float():
    return polygon(SQUARE, exact=False)


@pytest.fixture
def quad():
    return polygon(QUAD)


@pytest.fixture
def parallelogram():
    return polygon(PARALLELOGRAM)


@pytest.fixture
def circle():
    return ellipse((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def hexagon_float():
    return polygon([(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)], exact=False)


# acceptance lines are collected by tests/test_acceptance.py and printed at the end
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
