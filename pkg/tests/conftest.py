import functools

import pytest

from thetagrade.scenario import Scenario, open_session


GRID = {
    "sl3": Scenario("SL", 3, 3, [(3, "+")], seed=20240601),
    "sl6": Scenario("SL", 6, 3, [(3, "+"), (3, "+")], seed=20240602),
    "sp6": Scenario("Sp", 6, 3, [(3, "+")], seed=20240603),
    "sp4": Scenario("Sp", 4, 4, [(2, "-")], seed=20240604),
    "so5": Scenario("SO", 5, 4, [(2, "-")], seed=20240605),
    "so7": Scenario("SO", 7, 3, [(3, "+")], seed=20240606),
    "so6": Scenario("SO", 6, 3, [(3, "+")], seed=20240607),
    "so8": Scenario("SO", 8, 3, [(3, "+"), (1, "+")], seed=20240608),
    "sl3_outer": Scenario("SL", 3, 6, [(3, "+")], outer=True, seed=20240609),
    "sl4_outer": Scenario("SL", 4, 4, [(4, "+")], outer=True, sign="+I", seed=20240610),
    "zero_rank": Scenario("Sp", 2, 3, [(1, "+")], torus_part=[1], seed=20240611),
}


@functools.lru_cache(maxsize=None)
def cached_session(key):
    return open_session(GRID[key])


@pytest.fixture
def session_for():
    return cached_session
