import math
from fractions import Fraction

import numpy as np
import pytest

from coopcsma.helpers import is_eligible, rank_helpers, two_hop_cost
from coopcsma.topology import load_rates

from conftest import random_rate_table


def test_two_hop_cost_toy(toy_rates_exact):
    assert two_hop_cost(0, 2, toy_rates_exact) == Fraction(2, 3)


def test_two_hop_cost_arithmetic():
    rates = load_rates([1.0, 1.0], [[None, 1.0], [1.0, None]])
    assert two_hop_cost(0, 1, rates) == pytest.approx(2.0)
    rates = load_rates([2.0, 2.0], [[None, 4.0], [4.0, None]])
    assert two_hop_cost(0, 1, rates) == pytest.approx(0.75)


def test_two_hop_cost_rejects_self_relay(toy_rates):
    with pytest.raises(ValueError):
        two_hop_cost(1, 1, toy_rates)


def test_eligibility_toy(toy_rates):
    assert is_eligible(0, 2, toy_rates)  # 2/3 < 1
    assert is_eligible(1, 2, toy_rates)
    assert not is_eligible(2, 0, toy_rates)  # 1/3 beats any two-hop via a slow node
    assert not is_eligible(0, 1, toy_rates)


def test_eligibility_is_strict():
    # two-hop cost exactly equals the direct cost: no benefit, not eligible
    rates = load_rates([1.0, 2.0], [[None, 2.0], [2.0, None]])
    assert two_hop_cost(0, 1, rates) == pytest.approx(1.0)
    assert not is_eligible(0, 1, rates)


def test_rank_helpers_toy(toy_rates):
    assert rank_helpers(0, toy_rates, cap=1).helpers == [2]
    assert rank_helpers(1, toy_rates, cap=1).helpers == [2]
    assert rank_helpers(2, toy_rates, cap=math.inf).helpers == []


def test_rank_helpers_tie_broken_by_node_id():
    # helpers 1 and 2 offer identical two-hop cost to node 0
    direct = [0.5, 4.0, 4.0]
    pairwise = [
        [None, 4.0, 4.0],
        [4.0, None, 4.0],
        [4.0, 4.0, None],
    ]
    rates = load_rates(direct, pairwise)
    ranked = rank_helpers(0, rates)
    assert ranked.helpers == [1, 2]
    assert ranked.costs[0] == ranked.costs[1]


def test_rank_helpers_cap_validation(toy_rates):
    with pytest.raises(ValueError):
        rank_helpers(0, toy_rates, cap=0)
    with pytest.raises(ValueError):
        rank_helpers(0, toy_rates, cap=1.5)


def test_rank_respects_cap_and_order():
    rng = np.random.default_rng(5)
    for _ in range(20):
        rates = random_rate_table(rng, 8)
        for k in range(8):
            full = rank_helpers(k, rates)
            capped = rank_helpers(k, rates, cap=2)
            assert capped.helpers == full.helpers[:2]
            assert full.costs == sorted(full.costs)
            assert k not in full.helpers


def test_eligibility_scale_invariant():
    rng = np.random.default_rng(17)
    for _ in range(10):
        rates = random_rate_table(rng, 6)
        for c in (0.1, 3.0, 250.0):
            direct = [float(r) * c for r in rates.direct]
            pairwise = [
                [None if k == l else float(rates.pairwise[k, l]) * c for l in range(6)]
                for k in range(6)
            ]
            scaled = load_rates(direct, pairwise)
            for k in range(6):
                assert rank_helpers(k, rates).helpers == rank_helpers(k, scaled).helpers
                for h in range(6):
                    if h != k:
                        assert is_eligible(k, h, rates) == is_eligible(k, h, scaled)


def test_best_helper_matches_bruteforce_argmin():
    rng = np.random.default_rng(29)
    for _ in range(25):
        n = int(rng.integers(3, 9))
        rates = random_rate_table(rng, n)
        for k in range(n):
            costs = {
                j: two_hop_cost(k, j, rates)
                for j in range(n)
                if j != k and is_eligible(k, j, rates)
            }
            head = rank_helpers(k, rates, cap=1).helpers
            if not costs:
                assert head == []
            else:
                best = min(costs, key=lambda j: (costs[j], j))
                assert head == [best]


def test_listed_helpers_have_faster_direct_links():
    rng = np.random.default_rng(31)
    for _ in range(25):
        rates = random_rate_table(rng, 7)
        for k in range(7):
            for h in rank_helpers(k, rates).helpers:
                assert float(rates.direct[h]) > float(rates.direct[k])
