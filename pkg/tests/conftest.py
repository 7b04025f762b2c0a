import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def line4():
    x = np.array([0.0, 0.3, 0.6, 0.9])
    return np.abs(x[:, None] - x[None, :])


@pytest.fixture
def two_points():
    return np.array([[0.0, 0.5], [0.5, 0.0]])


ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Record one pass/fail line for an acceptance criterion; printed in the summary."""
    def _record(num, ok, detail):
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
