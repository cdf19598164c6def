"""Helper eligibility and ranking for two-hop uplink relaying."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .topology import RateTable


@dataclass
class HelperList:
    """Ordered helper candidates of one source node, cheapest two-hop cost first."""

    source: int
    helpers: list[int] = field(default_factory=list)
    costs: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.helpers)


def two_hop_cost(k: int, l: int, rates: RateTable):
    """Time per nat for the route k -> l -> AP."""
    if k == l:
        raise ValueError("a node cannot relay through itself")
    return 1 / rates.pairwise[k, l] + 1 / rates.direct[l]


def is_eligible(k: int, h: int, rates: RateTable) -> bool:
    """True when relaying via h is strictly faster than the direct link of k."""
    return bool(two_hop_cost(k, h, rates) < 1 / rates.direct[k])


def rank_helpers(k: int, rates: RateTable, cap: float = math.inf) -> HelperList:
    """All eligible helpers of node k sorted by two-hop cost, truncated to `cap`.

    Ties are broken by ascending node id. `cap = math.inf` keeps every
    eligible node (full network knowledge); an empty list is a valid result.
    """
    if cap != math.inf and not (isinstance(cap, int) and cap >= 1):
        raise ValueError("cap must be a positive integer or math.inf")
    ranked = sorted(
        (two_hop_cost(k, j, rates), j)
        for j in range(rates.n_nodes)
        if j != k and is_eligible(k, j, rates)
    )
    if cap != math.inf:
        ranked = ranked[: int(cap)]
    return HelperList(source=k, helpers=[j for _, j in ranked], costs=[c for c, _ in ranked])
