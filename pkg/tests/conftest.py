import itertools

import pytest

from trekcalc.dag import Dag

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def chain():
    return Dag([1, 2, 3], [(1, 2), (2, 3)])


@pytest.fixture
def collider():
    return Dag([1, 2, 3], [(1, 3), (2, 3)])


@pytest.fixture
def diamond():
    return Dag([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)])


@pytest.fixture
def volineq():
    return Dag([1, 2, 3, 4, 5], [(1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)])


def subsets(vs, k):
    return [frozenset(c) for c in itertools.combinations(vs, k)]
