from itertools import product

import pytest

from abelbound.matmod import MatrixMod


def mat(rows, n):
    return MatrixMod.from_rows(rows, n)


def brute_span(gens, n, rank):
    """All Z-linear combinations of gens mod n, by enumerating coefficient tuples."""
    out = set()
    for coeffs in product(range(n), repeat=len(gens)):
        out.add(tuple(sum(c * g[r] for c, g in zip(coeffs, gens)) % n for r in range(rank)))
    if not gens:
        out.add((0,) * rank)
    return out


@pytest.fixture
def shear_up():
    return lambda n: mat([[1, 1], [0, 1]], n)


@pytest.fixture
def shear_down():
    return lambda n: mat([[1, 0], [1, 1]], n)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
