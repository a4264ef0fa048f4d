import numpy as np
import pytest

from phdensity.geometry import PointCloud

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def unit_rows(rng, n, p):
    v = rng.standard_normal((n, p))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def circle_cloud(fractions):
    """Circle points at the given normalized positions in [0, 1)."""
    return PointCloud("circle", 2 * np.pi * np.asarray(fractions, dtype=float) - np.pi)
