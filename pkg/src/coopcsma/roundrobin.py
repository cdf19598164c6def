"""Closed-form Round-Robin throughput/bit-cost plus a step-through simulator.

Round-Robin (centralized TDMA, nodes transmitting in circular order) admits
exact per-node figures and serves as the desk-scale oracle for the CSMA
simulator's accounting. All arithmetic stays exact when the rate table holds
`fractions.Fraction` entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .helpers import is_eligible, rank_helpers
from .topology import RateTable

EXHAUSTIVE_NODE_LIMIT = 12


@dataclass
class RRAssignment:
    """Per-node uplink route: None for direct transmission, else the helper id."""

    routes: list

    @property
    def n_nodes(self) -> int:
        return len(self.routes)


@dataclass
class RRMetrics:
    """Shared per-node throughput and the per-node bit-cost vector."""

    throughput: object
    bit_cost: list


def _validate_assignment(rates: RateTable, assignment: RRAssignment) -> None:
    if assignment.n_nodes != rates.n_nodes:
        raise ValueError("assignment and rate table disagree on the number of nodes")
    for k, h in enumerate(assignment.routes):
        if h is None:
            continue
        if not (0 <= h < rates.n_nodes) or h == k:
            raise ValueError(f"node {k} routed via invalid node {h}")
        if not is_eligible(k, h, rates):
            raise ValueError(f"node {h} is not an eligible helper for node {k}")


def forwarded_counts(assignment: RRAssignment) -> list[int]:
    """Packets each node forwards per round (number of sources routed via it)."""
    counts = [0] * assignment.n_nodes
    for h in assignment.routes:
        if h is not None:
            counts[h] += 1
    return counts


def travel_times(rates: RateTable, assignment: RRAssignment) -> list:
    """Per-node travel time of one packet: direct 1/R_k, via h 1/R_kh + 1/R_h."""
    _validate_assignment(rates, assignment)
    s = []
    for k, h in enumerate(assignment.routes):
        if h is None:
            s.append(1 / rates.direct[k])
        else:
            s.append(1 / rates.pairwise[k, h] + 1 / rates.direct[h])
    return s


def transmission_times(rates: RateTable, assignment: RRAssignment) -> list:
    """Per-node channel time per round: own transmission plus forwarding at R_k."""
    _validate_assignment(rates, assignment)
    counts = forwarded_counts(assignment)
    t = []
    for k, h in enumerate(assignment.routes):
        own = 1 / rates.direct[k] if h is None else 1 / rates.pairwise[k, h]
        t.append(own + counts[k] * (1 / rates.direct[k]))
    return t


def rr_metrics(rates: RateTable, assignment: RRAssignment, tx_power=None) -> RRMetrics:
    """Closed-form Round-Robin figures: S = 1/sum(s_l), B_k = t_k * E.

    Throughput is identical for every node by construction, so a single value
    is returned.
    """
    if tx_power is None:
        tx_power = rates.tx_power
    s = travel_times(rates, assignment)
    t = transmission_times(rates, assignment)
    round_time = sum(s)
    return RRMetrics(throughput=1 / round_time, bit_cost=[tk * tx_power for tk in t])


def rr_simulate(rates: RateTable, assignment: RRAssignment, rounds: int, tx_power=None) -> RRMetrics:
    """Time-stepped Round-Robin run: count delivered nats and busy time per node.

    Independent of the closed form above; relaying helpers forward each
    received packet to the AP immediately, inside the source's turn.
    """
    if rounds < 1:
        raise ValueError("need at least one round")
    if tx_power is None:
        tx_power = rates.tx_power
    _validate_assignment(rates, assignment)
    n = rates.n_nodes
    delivered = [0] * n
    busy = [0] * n
    clock = 0
    for _ in range(rounds):
        for k in range(n):
            h = assignment.routes[k]
            if h is None:
                own = 1 / rates.direct[k]
                busy[k] += own
                clock += own
            else:
                first_hop = 1 / rates.pairwise[k, h]
                forward = 1 / rates.direct[h]
                busy[k] += first_hop
                busy[h] += forward
                clock += first_hop + forward
            delivered[k] += 1
    throughput = delivered[0] / clock
    bit_cost = [tx_power * busy[k] / delivered[k] for k in range(n)]
    return RRMetrics(throughput=throughput, bit_cost=bit_cost)


def rr_best_assignment(rates: RateTable, mode: str = "greedy") -> RRAssignment:
    """Route choice minimizing the round time (equivalently maximizing S).

    "greedy" picks each node's best eligible helper independently, which is
    optimal because s_k depends only on k's own route. "exhaustive" enumerates
    every route vector (guarded to small networks) and exists as a
    cross-check.
    """
    n = rates.n_nodes
    if mode == "greedy":
        routes = []
        for k in range(n):
            best = rank_helpers(k, rates, cap=1)
            routes.append(best.helpers[0] if best.helpers else None)
        return RRAssignment(routes=routes)
    if mode == "exhaustive":
        if n > EXHAUSTIVE_NODE_LIMIT:
            raise ValueError(
                f"exhaustive route enumeration supports at most {EXHAUSTIVE_NODE_LIMIT} nodes, got {n}"
            )
        options = [[None] + rank_helpers(k, rates).helpers for k in range(n)]
        best_routes = None
        best_time = None
        for combo in itertools.product(*options):
            candidate = RRAssignment(routes=list(combo))
            round_time = sum(travel_times(rates, candidate))
            if best_time is None or round_time < best_time:
                best_time = round_time
                best_routes = candidate
        return best_routes
    raise ValueError(f"unknown mode: {mode!r}")
