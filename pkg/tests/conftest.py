import numpy as np
import pytest

from boxlasso.model import Problem

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_line():
    """Record a one-line verdict shown in the terminal summary."""

    def record(label, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return record


@pytest.fixture
def unit_square():
    # (x-2)^2 + (y-2)^2 over the unit square
    return Problem(np.eye(2), [2.0, 2.0], [1.0, 1.0])


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
