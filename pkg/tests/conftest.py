from pathlib import Path

import pytest

from efxgraph.graphs import make_path
from efxgraph.model import Allocation, Instance

FIXTURES = Path(__file__).parent / "fixtures"

P3_SPLIT_ROWS = [[9, 1, 0, 0, 0, 0], [8, 0, 0, 0, 0, 2], [2, 2, 2, 1, 2, 1]]
PHI2_RISE_ROWS = [[120, 200, 80, 120, 400, 80], [39, 39, 38, 77, 769, 38], [994, 1, 1, 1, 2, 1]]


def alloc(*bundles) -> Allocation:
    return Allocation(tuple(frozenset(b) for b in bundles))


@pytest.fixture
def p3_split() -> Instance:
    return Instance.additive(P3_SPLIT_ROWS)


@pytest.fixture
def p3_split_bad() -> Allocation:
    # goods g1..g6 are ids 0..5
    return alloc({0, 1}, {4, 5}, {2, 3})


@pytest.fixture
def p3():
    return make_path(3)


@pytest.fixture
def phi2_rise() -> Instance:
    return Instance.additive(PHI2_RISE_ROWS)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
