import math

import pytest
from hypothesis import HealthCheck, settings

from curvequant.curves import (
    build_circular_arc,
    build_ellipse,
    build_hexagon,
    build_semicircle_mixed,
)

settings.register_profile(
    "curvequant", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("curvequant")

# (criterion label, passed, detail) appended by tests/test_acceptance.py
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def hexagon():
    return build_hexagon()


@pytest.fixture(scope="session")
def semicircle():
    return build_semicircle_mixed()


@pytest.fixture(scope="session")
def ellipse():
    return build_ellipse()


@pytest.fixture(scope="session")
def half_circle():
    return build_circular_arc(0.0, math.pi)


@pytest.fixture(scope="session")
def builtin_curves(hexagon, semicircle, ellipse, half_circle):
    return {"hexagon": hexagon, "semicircle": semicircle, "ellipse": ellipse, "arc": half_circle}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
