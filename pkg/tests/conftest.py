import os
import sys
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "lamplab", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lamplab")

from lamplab.diagram import corpus, distributive_cells, grid, insert_multifork  # noqa: E402
from lamplab.order import Poset  # noqa: E402

from acceptance_log import LINES as ACCEPTANCE_LINES  # noqa: E402



@lru_cache(maxsize=None)
def cached_corpus(max_length: int):
    return tuple(corpus(max_length))


@pytest.fixture
def s7():
    g = grid(1, 1)
    return insert_multifork(g, distributive_cells(g)[0], 1)


@pytest.fixture
def y_poset():
    return Poset(["0", "c", "a", "b"], [("0", "c"), ("c", "a"), ("c", "b")])


@pytest.fixture
def v_poset():
    return Poset(["i", "a", "b"], [("i", "a"), ("i", "b")])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
