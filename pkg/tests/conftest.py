import math

import numpy as np
import pytest

from kolmobell import build_family, build_space

OPTIMAL_A = [0.0, math.pi / 2]
OPTIMAL_B = [math.pi / 4, -math.pi / 4]

# acceptance verdicts collected by test_acceptance.py, printed at the end
ACCEPTANCE_LINES = []


@pytest.fixture
def optimal_family():
    return build_family(angles_a=OPTIMAL_A, angles_b=OPTIMAL_B, model="singlet")


@pytest.fixture
def optimal_space(optimal_family):
    return build_space(optimal_family)


def random_grid(rng, m=2, n=2, sparse=False):
    """Random complete table grid; ``sparse`` zeroes some entries."""
    grid = {}
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            p = rng.dirichlet(np.ones(4))
            if sparse:
                mask = rng.random(4) < 0.4
                mask[rng.integers(4)] = False
                p = np.where(mask, 0.0, p)
                p = p / p.sum()
            grid[(i, j)] = p.tolist()
    return grid


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
