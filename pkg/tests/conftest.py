import numpy as np
import pytest

from onestreet.dataset import build_dataset
from onestreet.game import GameConfig

# 3 cards, bets {0, 1.5, 3}: small enough to enumerate every pure strategy
TINY = GameConfig(deck_size=3, bet_steps=3, bet_increment=1.5, ante=0.5, stack=3.0)


@pytest.fixture(scope="session")
def tiny_cfg():
    return TINY


@pytest.fixture(scope="session")
def small_dataset():
    """Forty solved random games, shared by the learning and rule tests."""
    return build_dataset(count=40, master_seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance criteria outcomes, printed once at the end of the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
