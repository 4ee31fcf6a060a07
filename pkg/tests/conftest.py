"""Shared test utilities: the acceptance reporter and point generators."""

import numpy as np
import pytest

_ACCEPTANCE_LINES = []


def record_criterion(number: int, name: str, passed: bool, detail: str = ""):
    """Collect one pass/fail line per acceptance criterion for the summary."""
    status = "PASS" if passed else "FAIL"
    suffix = f" -- {detail}" if detail else ""
    _ACCEPTANCE_LINES.append(f"criterion {number:2d} [{status}] {name}{suffix}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_points(rng, n, scale=2.0):
    """Random group points as an (n, 3) array, vertical coordinate compressed."""
    pts = rng.normal(scale=scale, size=(n, 3))
    pts[:, 2] *= 0.25
    return pts
