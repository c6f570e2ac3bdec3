import numpy as np
import pytest

from diskmaps import BlaschkeProduct

FIGURE_ZEROS = (0.5, -0.5, 0.5j, -0.5j)


@pytest.fixture
def figure_map():
    """Degree-4 product equal to (1 - 16 z^4) / (z^4 - 16)."""
    return BlaschkeProduct(FIGURE_ZEROS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_disk_points(rng, n, radius=1.0):
    return radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    """Remember one pass/fail line; the lines are echoed in the terminal summary."""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
