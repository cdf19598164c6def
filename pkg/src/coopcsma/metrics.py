"""Per-node and aggregate performance figures: throughput, power, bit-cost, lifetime."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import Accumulators

# Exact column order of the metrics CSV. Aggregate rows use node_id = ALL and
# carry the per-node mean throughput, the maximum bit-cost, and the network
# lifetime (lifetime stays empty on per-node rows).
CSV_COLUMNS = [
    "protocol",
    "H",
    "Q",
    "P",
    "tau",
    "sigma",
    "snr_db",
    "seed",
    "node_id",
    "delivered_nats",
    "transmit_time",
    "clock",
    "throughput",
    "avg_power",
    "bit_cost",
    "lifetime",
]
AGGREGATE_NODE_ID = "ALL"


@dataclass
class MetricsReport:
    """Finalized per-node figures of one run (or of merged replications).

    throughput[k] counts only node k's own delivered nats per time unit;
    avg_power[k] includes forwarding energy; bit_cost[k] is energy per own
    delivered nat and is +inf for a node that spent energy without delivering.
    """

    delivered: np.ndarray
    transmit_time: np.ndarray
    clock: float
    tx_power: float
    throughput: np.ndarray
    avg_power: np.ndarray
    bit_cost: np.ndarray
    idle_events: int = 0
    successes: int = 0
    collisions: int = 0

    @property
    def n_nodes(self) -> int:
        return self.delivered.shape[0]

    @property
    def competitions(self) -> int:
        return self.successes + self.collisions

    @property
    def mean_throughput(self) -> float:
        return float(np.mean(self.throughput))

    @property
    def max_bit_cost(self) -> float:
        """Worst per-node bit-cost; nodes that never transmitted nor delivered are skipped."""
        considered = (self.delivered > 0) | (self.transmit_time > 0)
        if not considered.any():
            return math.nan
        return float(np.max(self.bit_cost[considered]))

    @property
    def mean_bit_cost(self) -> float:
        return float(np.mean(self.bit_cost))


def finalize(acc: Accumulators, tx_power: float) -> MetricsReport:
    """Turn raw accumulators into per-node rates and costs."""
    if not acc.clock > 0:
        raise ValueError("cannot finalize metrics with a zero clock")
    delivered = acc.delivered.astype(float)
    transmit_time = acc.transmit_time.astype(float)
    throughput = delivered / acc.clock
    avg_power = tx_power * transmit_time / acc.clock
    with np.errstate(divide="ignore", invalid="ignore"):
        bit_cost = np.where(delivered > 0, tx_power * transmit_time / delivered, math.inf)
    return MetricsReport(
        delivered=delivered,
        transmit_time=transmit_time,
        clock=float(acc.clock),
        tx_power=tx_power,
        throughput=throughput,
        avg_power=avg_power,
        bit_cost=bit_cost,
        idle_events=acc.idle_events,
        successes=acc.successes,
        collisions=acc.collisions,
    )


def merge_reports(reports: list[MetricsReport]) -> MetricsReport:
    """Pool replications into one report, weighting per-node rates by clock time."""
    if not reports:
        raise ValueError("nothing to merge")
    tx_power = reports[0].tx_power
    if any(r.tx_power != tx_power for r in reports) or any(
        r.n_nodes != reports[0].n_nodes for r in reports
    ):
        raise ValueError("replication reports disagree on tx_power or network size")
    pooled = Accumulators(
        clock=sum(r.clock for r in reports),
        transmit_time=np.sum([r.transmit_time for r in reports], axis=0),
        delivered=np.sum([r.delivered for r in reports], axis=0),
        idle_events=sum(r.idle_events for r in reports),
        successes=sum(r.successes for r in reports),
        collisions=sum(r.collisions for r in reports),
    )
    return finalize(pooled, tx_power)


def gains_vs_baseline(report: MetricsReport, baseline: MetricsReport) -> tuple[float, float]:
    """(throughput gain, max-bit-cost increase) of a protocol against a baseline run."""
    base_s = baseline.mean_throughput
    if not base_s > 0:
        raise ValueError("baseline throughput is zero")
    base_b = baseline.max_bit_cost
    if not (math.isfinite(base_b) and base_b > 0):
        raise ValueError("baseline max bit-cost is zero or undefined")
    return report.mean_throughput / base_s, report.max_bit_cost / base_b


def lifetime(energy_budget: float, report: MetricsReport) -> float:
    """Network lifetime t = W / (B * S) with B the max bit-cost, S the mean throughput."""
    if not energy_budget > 0:
        raise ValueError("energy budget must be positive")
    b = report.max_bit_cost
    s = report.mean_throughput
    if not (math.isfinite(b) and b > 0 and s > 0):
        raise ValueError("lifetime undefined: max bit-cost or throughput is zero/undefined")
    return energy_budget / (b * s)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip repr, numpy scalars included
    return str(value)


def csv_header() -> str:
    return ",".join(CSV_COLUMNS)


def csv_rows(report: MetricsReport, meta: dict, energy_budget: float = 1.0) -> list[str]:
    """Per-node rows plus one ALL aggregate row, in the documented column order.

    `meta` supplies the run-identifying columns: protocol, H, Q, P, tau,
    sigma, snr_db, seed. The aggregate row reuses the throughput and bit_cost
    columns for the per-node mean throughput and the maximum bit-cost, and
    fills the lifetime column (empty when lifetime is undefined).
    """
    prefix = [
        str(meta.get("protocol", "")),
        str(meta.get("H", "")),
        str(meta.get("Q", "")),
        str(meta.get("P", "")),
        _fmt(meta.get("tau", "")),
        _fmt(meta.get("sigma", "")),
        _fmt(meta.get("snr_db", "")),
        str(meta.get("seed", "")),
    ]
    rows = []
    for k in range(report.n_nodes):
        rows.append(
            ",".join(
                prefix
                + [
                    str(k),
                    str(int(report.delivered[k])),
                    _fmt(float(report.transmit_time[k])),
                    _fmt(report.clock),
                    _fmt(float(report.throughput[k])),
                    _fmt(float(report.avg_power[k])),
                    _fmt(float(report.bit_cost[k])),
                    "",
                ]
            )
        )
    try:
        life = _fmt(lifetime(energy_budget, report))
    except ValueError:
        life = ""
    rows.append(
        ",".join(
            prefix
            + [
                AGGREGATE_NODE_ID,
                str(int(np.sum(report.delivered))),
                _fmt(float(np.sum(report.transmit_time))),
                _fmt(report.clock),
                _fmt(report.mean_throughput),
                _fmt(float(np.mean(report.avg_power))),
                _fmt(report.max_bit_cost),
                life,
            ]
        )
    )
    return rows
