"""Slotted-CSMA contention core: sensing slots, attempts, collisions, accounting.

Channel access model: time advances in idle slots of length sigma. Every
saturated node that sensed the previous slot idle attempts with probability
tau at the next slot boundary. Zero attempts leave the slot idle; exactly one
attempt occupies the channel with the attempter's transmission plan; two or
more collide and occupy the channel for the longest first-segment exposure
among the colliders (carrier sensing keeps everyone else silent meanwhile).

Every busy period is preceded by exactly one mandatory idle sensing slot (the
slot in which the channel is sensed idle again), so a lone node with tau = 1
cycles deterministically through [sigma, transmission].

Control frames (ACK, preACK, jointACK) cost zero time and zero energy and are
never lost. A single PCG64 stream drives all nodes' attempt coin flips in
node-id order, so a fixed seed reproduces the event trace bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .topology import RateTable

AP = -1  # destination marker for node-to-access-point segments

IDLE = "idle"
SUCCESS = "success"
COLLISION = "collision"

DEFAULT_BLOCK_SLOTS = 4096


@dataclass
class CsmaParams:
    """Slot length sigma (time units) and per-node per-slot attempt probability tau."""

    sigma: float
    tau: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")


@dataclass
class Segment:
    """One uninterrupted transmission: who sends, for how long, to whom (AP = -1)."""

    transmitter: int
    duration: float
    destination: int


@dataclass
class TransmissionPlan:
    """What a node would send if it wins the channel.

    Plans carry protocol payload descriptors so the success/collision handlers
    can update state: `route` distinguishes direct packets, CoopMAC two-hop
    relays, fairMAC packets addressed to a helper (`helper_slot` indexes the
    initiator's helper list), and fairMAC joint packets (`forwarded` holds the
    queued (origin, tag) pairs included at formation time).
    """

    initiator: int
    segments: list[Segment]
    route: str = "direct"
    helper_slot: int = -1
    forwarded: tuple = ()

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a transmission plan needs at least one segment")
        for seg in self.segments:
            if not seg.duration > 0:
                raise ValueError("segment durations must be positive")

    @property
    def collision_exposure(self) -> float:
        """Channel time the initiator burns if the attempt collides (first segment)."""
        return self.segments[0].duration

    @property
    def duration(self) -> float:
        return sum(seg.duration for seg in self.segments)


@dataclass
class ContentionOutcome:
    """Result of one contention step: an idle slot, a success, or a collision."""

    kind: str
    plans: list[TransmissionPlan]
    elapsed: float

    def transmit_times(self) -> dict[int, float]:
        """Per-node channel time spent in this event."""
        spent: dict[int, float] = {}
        if self.kind == SUCCESS:
            for seg in self.plans[0].segments:
                spent[seg.transmitter] = spent.get(seg.transmitter, 0.0) + seg.duration
        elif self.kind == COLLISION:
            for plan in self.plans:
                spent[plan.initiator] = spent.get(plan.initiator, 0.0) + plan.collision_exposure
        return spent


@dataclass
class Accumulators:
    """Running totals of one simulation: clock, per-node transmit time, deliveries."""

    clock: float
    transmit_time: np.ndarray
    delivered: np.ndarray
    idle_events: int = 0
    successes: int = 0
    collisions: int = 0

    @classmethod
    def zeros(cls, n_nodes: int) -> "Accumulators":
        return cls(clock=0.0, transmit_time=np.zeros(n_nodes), delivered=np.zeros(n_nodes))

    @property
    def competitions(self) -> int:
        return self.successes + self.collisions


@dataclass(frozen=True)
class EventRecord:
    """One line of the event trace."""

    index: int
    kind: str
    participants: tuple
    elapsed: float
    clock: float

    def line(self) -> str:
        who = ",".join(str(p) for p in self.participants) if self.participants else "-"
        return f"{self.index} {self.kind} {who} {self.elapsed!r} {self.clock!r}"


Observer = Callable[[EventRecord, Optional[ContentionOutcome]], None]


def contention_step(nodes: Sequence[int], plan_for, params: CsmaParams, rng) -> ContentionOutcome:
    """One attempt round: each node flips tau independently, in node-id order.

    `plan_for(node)` supplies the transmission plan on demand, so plans are
    only formed for nodes that actually attempt.
    """
    draws = rng.random(len(nodes))
    attempters = [nodes[i] for i in np.flatnonzero(draws < params.tau)]
    if not attempters:
        return ContentionOutcome(IDLE, [], params.sigma)
    plans = [plan_for(k) for k in attempters]
    if len(plans) == 1:
        return ContentionOutcome(SUCCESS, plans, plans[0].duration)
    return ContentionOutcome(COLLISION, plans, max(p.collision_exposure for p in plans))


def account_event(outcome: ContentionOutcome, acc: Accumulators, credits: Sequence[tuple[int, int]] = ()) -> None:
    """Fold one outcome into the totals.

    The clock advances by the event's elapsed time; every transmitting node is
    charged its own transmitted duration (on collision: only its first-segment
    exposure); delivered payload is credited only on success, per `credits`
    (node, nats) pairs supplied by the protocol layer.
    """
    acc.clock += outcome.elapsed
    if outcome.kind == IDLE:
        acc.idle_events += 1
        return
    for node, spent in outcome.transmit_times().items():
        acc.transmit_time[node] += spent
    if outcome.kind == SUCCESS:
        acc.successes += 1
        for node, nats in credits:
            acc.delivered[node] += nats
    else:
        acc.collisions += 1


def _busy_rounds(rng, n_nodes: int, tau: float, block_slots: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (idle-round gap, attempter ids) per busy round, batching the coin flips.

    Consumes uniforms exactly as per-round `rng.random(n_nodes)` calls would
    (C-order rows of a block), so a naive `contention_step` loop with the same
    seed sees the same flips.
    """
    pending_idle = 0
    while True:
        attempts = rng.random((block_slots, n_nodes)) < tau
        busy_rows = np.flatnonzero(attempts.any(axis=1))
        prev = -1
        for row in busy_rows:
            yield pending_idle + int(row - prev - 1), np.flatnonzero(attempts[row])
            pending_idle = 0
            prev = int(row)
        pending_idle += block_slots - 1 - prev


@dataclass
class SimResult:
    """Accumulators plus the run's identifying parameters."""

    acc: Accumulators
    params: CsmaParams
    tx_power: float
    seed: int
    competitions: int


def run_csma(
    rates: RateTable,
    protocol,
    params: CsmaParams,
    seed: int,
    competitions: int,
    observer: Observer | None = None,
    block_slots: int = DEFAULT_BLOCK_SLOTS,
) -> SimResult:
    """Run slotted CSMA until the nodes have competed `competitions` times.

    A competition is any event where at least one node transmits (success or
    collision); idle slots do not count toward the budget. The run is
    single-threaded and bit-deterministic for a fixed seed.
    """
    if competitions < 1:
        raise ValueError("competitions must be >= 1")
    n = rates.n_nodes
    rng = np.random.default_rng(seed)
    acc = Accumulators.zeros(n)
    sigma = params.sigma
    index = 0

    def emit_idle(count: int) -> None:
        nonlocal index
        if observer is None:
            acc.clock += count * sigma
            acc.idle_events += count
            index += count
            return
        for _ in range(count):
            outcome = ContentionOutcome(IDLE, [], sigma)
            account_event(outcome, acc)
            observer(EventRecord(index, IDLE, (), sigma, acc.clock), outcome)
            index += 1

    rounds = _busy_rounds(rng, n, params.tau, block_slots)
    while acc.competitions < competitions:
        gap, attempters = next(rounds)
        # one mandatory sensing slot opens the cycle, then any zero-flip rounds
        emit_idle(1 + gap)
        plans = [protocol.plan(int(k)) for k in attempters]
        if len(plans) == 1:
            outcome = ContentionOutcome(SUCCESS, plans, plans[0].duration)
            credits = protocol.on_success(plans[0])
        else:
            outcome = ContentionOutcome(
                COLLISION, plans, max(p.collision_exposure for p in plans)
            )
            protocol.on_collision(plans)
            credits = ()
        account_event(outcome, acc, credits)
        if observer is not None:
            if outcome.kind == SUCCESS:
                participants = tuple(seg.transmitter for seg in plans[0].segments)
            else:
                participants = tuple(p.initiator for p in plans)
            observer(EventRecord(index, outcome.kind, participants, outcome.elapsed, acc.clock), outcome)
        index += 1
    return SimResult(acc=acc, params=params, tx_power=rates.tx_power, seed=seed, competitions=competitions)
