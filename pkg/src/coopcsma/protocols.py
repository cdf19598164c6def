"""Per-node uplink protocol state machines: Direct Link, CoopMAC, fairMAC.

All protocols share the contention engine; they differ in the transmission
plans they form and in how they react to outcomes.

Direct Link: every winner sends its head-of-line packet straight to the AP.

CoopMAC (base mode): a node with a helper sends its packet to the helper, and
the helper immediately forwards it to the AP inside the same busy period. The
AP acknowledges the source. On collision the helper stays idle and the source
retries the same packet via the same helper.

fairMAC: the helper decides when to forward. A source sends its packet to the
best-ranked helper whose pending counter allows it; the helper queues the
packet (preACK, pending + 1) and later bundles up to Q queued packets with one
own packet into a joint packet on its own direct transmissions. The AP's
jointACK credits every origin and releases their pending counters. When all
pending counters exceed P, the source falls back to direct transmission
(which, being a direct-to-AP transmission, also carries its own queued
forwards, if any).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass

from .engine import AP, Segment, TransmissionPlan
from .helpers import rank_helpers
from .topology import RateTable

DIRECT_LINK = "direct"
COOPMAC = "coopmac"
FAIRMAC = "fairmac"

KINDS = (DIRECT_LINK, COOPMAC, FAIRMAC)


@dataclass
class ProtocolConfig:
    """Protocol kind plus the fairMAC knobs.

    max_helpers (H): how many ranked helpers a source keeps, int or math.inf.
    max_pending (P): a helper is usable while its pending counter is <= P.
    forward_batch (Q): queued packets a helper may bundle into one joint packet.
    The knobs are ignored unless kind is fairMAC; CoopMAC always uses the
    single best helper.
    """

    kind: str = DIRECT_LINK
    max_helpers: float = 1
    max_pending: int = 10
    forward_batch: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown protocol kind: {self.kind!r}")
        if self.max_helpers != math.inf and not (
            isinstance(self.max_helpers, int) and self.max_helpers >= 1
        ):
            raise ValueError("max_helpers must be a positive integer or math.inf")
        if not (isinstance(self.max_pending, int) and self.max_pending >= 0):
            raise ValueError("max_pending must be a non-negative integer")
        if not (isinstance(self.forward_batch, int) and self.forward_batch >= 1):
            raise ValueError("forward_batch must be a positive integer")

    def label(self) -> str:
        if self.kind != FAIRMAC:
            return self.kind
        h = "inf" if self.max_helpers == math.inf else str(self.max_helpers)
        return f"fairmac[H={h} Q={self.forward_batch} P={self.max_pending}]"


def select_route(pending: list[int], max_pending: int):
    """Index of the best-ranked helper still accepting packets, or None for direct."""
    for slot, count in enumerate(pending):
        if count <= max_pending:
            return slot
    return None


class DirectLink:
    """Saturated direct transmission to the AP."""

    def __init__(self, rates: RateTable, config: ProtocolConfig | None = None):
        self.rates = rates
        self.config = config or ProtocolConfig(DIRECT_LINK)

    def plan(self, k: int) -> TransmissionPlan:
        return TransmissionPlan(k, [Segment(k, 1.0 / self.rates.direct[k], AP)])

    def on_success(self, plan: TransmissionPlan):
        return ((plan.initiator, 1),)

    def on_collision(self, plans) -> None:
        pass  # colliders retry the same packet on a later attempt


class CoopMac:
    """CoopMAC base mode: immediate two-hop forwarding via the single best helper."""

    def __init__(self, rates: RateTable, config: ProtocolConfig | None = None):
        self.rates = rates
        self.config = config or ProtocolConfig(COOPMAC)
        self.helper_lists = [rank_helpers(k, rates, cap=1) for k in range(rates.n_nodes)]

    def helper_of(self, k: int):
        picks = self.helper_lists[k].helpers
        return picks[0] if picks else None

    def plan(self, k: int) -> TransmissionPlan:
        h = self.helper_of(k)
        if h is None:
            return TransmissionPlan(k, [Segment(k, 1.0 / self.rates.direct[k], AP)])
        return TransmissionPlan(
            k,
            [
                Segment(k, 1.0 / self.rates.pairwise[k, h], h),
                Segment(h, 1.0 / self.rates.direct[h], AP),
            ],
            route="twohop",
        )

    def on_success(self, plan: TransmissionPlan):
        return ((plan.initiator, 1),)

    def on_collision(self, plans) -> None:
        pass  # helpers that could not decode stay idle; sources retry later


class FairMac:
    """fairMAC with ranked helper lists, pending counters, and forwarding queues."""

    def __init__(self, rates: RateTable, config: ProtocolConfig):
        n = rates.n_nodes
        self.rates = rates
        self.config = config
        self.helper_lists = [rank_helpers(k, rates, cap=config.max_helpers) for k in range(n)]
        # slot of node k in the helper list of each origin that may use k
        self._slot_of = [
            {hl.source: slot for hl in self.helper_lists for slot, h in enumerate(hl.helpers) if h == k}
            for k in range(n)
        ]
        self.pending = [[0] * len(hl.helpers) for hl in self.helper_lists]
        self.forward_queue = [deque() for _ in range(n)]
        self.next_tag = [0] * n

    def select_route(self, k: int):
        return select_route(self.pending[k], self.config.max_pending)

    def plan(self, k: int) -> TransmissionPlan:
        slot = self.select_route(k)
        if slot is not None:
            h = self.helper_lists[k].helpers[slot]
            return TransmissionPlan(
                k,
                [Segment(k, 1.0 / self.rates.pairwise[k, h], h)],
                route="to_helper",
                helper_slot=slot,
            )
        queue = self.forward_queue[k]
        take = min(self.config.forward_batch, len(queue))
        bundled = tuple(itertools.islice(queue, take))
        duration = (1 + take) / self.rates.direct[k]
        return TransmissionPlan(k, [Segment(k, duration, AP)], route="joint", forwarded=bundled)

    def on_success(self, plan: TransmissionPlan):
        k = plan.initiator
        if plan.route == "to_helper":
            h = self.helper_lists[k].helpers[plan.helper_slot]
            self.forward_queue[h].append((k, self.next_tag[k]))
            self.next_tag[k] += 1
            self.pending[k][plan.helper_slot] += 1  # preACK received
            return ()
        # joint packet: jointACK names every carried origin
        queue = self.forward_queue[k]
        for origin, tag in plan.forwarded:
            head = queue.popleft()
            if head != (origin, tag):
                raise RuntimeError(
                    f"jointACK names packet {(origin, tag)} but queue head is {head}"
                )
            self.pending[origin][self._slot_of[k][origin]] -= 1
        self.next_tag[k] += 1
        return ((k, 1),) + tuple((origin, 1) for origin, _ in plan.forwarded)

    def on_collision(self, plans) -> None:
        pass  # no ACKs: queues, tags, and pending counters are untouched

    def check_consistency(self) -> None:
        """Assert pending counters equal the matching queue contents (test hook)."""
        by_pair = Counter()
        for h, q in enumerate(self.forward_queue):
            for origin, _ in q:
                by_pair[(origin, h)] += 1
        for k, hl in enumerate(self.helper_lists):
            for slot, h in enumerate(hl.helpers):
                count = self.pending[k][slot]
                if count != by_pair.get((k, h), 0):
                    raise AssertionError(
                        f"pending[{k}][{slot}] = {count} but helper {h} queues "
                        f"{by_pair.get((k, h), 0)} packets of node {k}"
                    )
                if not 0 <= count <= self.config.max_pending + 1:
                    raise AssertionError(f"pending[{k}][{slot}] = {count} out of range")


def make_protocol(rates: RateTable, config: ProtocolConfig):
    """Instantiate the state machine for one simulation run."""
    if config.kind == DIRECT_LINK:
        return DirectLink(rates, config)
    if config.kind == COOPMAC:
        return CoopMac(rates, config)
    return FairMac(rates, config)
