import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from coopcsma.topology import load_rates

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def toy_rate_values(exact=False):
    """The three-node relay example: two slow edge nodes, one fast candidate."""
    one = Fraction(1) if exact else 1.0
    three = Fraction(3) if exact else 3.0
    direct = [one, one, three]
    pairwise = [
        [None, one, three],
        [one, None, three],
        [three, three, None],
    ]
    return direct, pairwise


@pytest.fixture
def toy_rates():
    direct, pairwise = toy_rate_values()
    return load_rates(direct, pairwise, tx_power=1.0)


@pytest.fixture
def toy_rates_exact():
    direct, pairwise = toy_rate_values(exact=True)
    return load_rates(direct, pairwise, tx_power=Fraction(1))


def random_rate_table(rng, n, spread=4.0):
    """Random positive rate table with symmetric pairwise rates."""
    direct = rng.uniform(0.3, spread, size=n)
    pair = rng.uniform(0.3, spread, size=(n, n))
    pair = (pair + pair.T) / 2.0
    np.fill_diagonal(pair, np.nan)
    return load_rates(list(direct), [list(row) for row in pair], tx_power=1.0)


@pytest.fixture
def data_dir():
    return DATA_DIR
