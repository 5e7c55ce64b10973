import random

import pytest

from gkzcc.matrix import IntMatrix

# filled by test_acceptance; echoed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def random_unimodular(rng: random.Random, size: int, steps: int = 8) -> IntMatrix:
    """Product of random elementary row operations (shears and swaps)."""
    M = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(steps):
        if size == 1:
            M[0] = [-v for v in M[0]] if rng.random() < 0.5 else M[0]
            continue
        i, j = rng.sample(range(size), 2)
        kind = rng.random()
        if kind < 0.7:
            c = rng.choice([-2, -1, 1, 2])
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
        elif kind < 0.85:
            M[i], M[j] = M[j], M[i]
        else:
            M[i] = [-a for a in M[i]]
    return IntMatrix(M)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
