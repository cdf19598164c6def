"""Cooperative slotted-CSMA uplink simulator.

Deterministic packet-level simulation of Direct Link, CoopMAC, and the
parameterizable fairMAC protocol, with per-node throughput, bit-cost, and
network lifetime metrics, plus an exact Round-Robin analytic oracle.
"""

from .engine import CsmaParams, run_csma
from .experiments import ExperimentConfig, lifetime_study, run_experiment
from .helpers import is_eligible, rank_helpers, two_hop_cost
from .metrics import MetricsReport, finalize, gains_vs_baseline, lifetime, merge_reports
from .protocols import ProtocolConfig, make_protocol
from .roundrobin import RRAssignment, rr_best_assignment, rr_metrics, rr_simulate
from .topology import (
    RateTable,
    Topology,
    build_rate_table,
    calibrate_power,
    generate_topology,
    load_network,
    load_rates,
    save_network,
)

__all__ = [
    "CsmaParams",
    "ExperimentConfig",
    "MetricsReport",
    "ProtocolConfig",
    "RRAssignment",
    "RateTable",
    "Topology",
    "build_rate_table",
    "calibrate_power",
    "finalize",
    "gains_vs_baseline",
    "generate_topology",
    "is_eligible",
    "lifetime",
    "lifetime_study",
    "load_network",
    "load_rates",
    "make_protocol",
    "merge_reports",
    "rank_helpers",
    "rr_best_assignment",
    "rr_metrics",
    "rr_simulate",
    "run_csma",
    "run_experiment",
    "save_network",
    "two_hop_cost",
]

__version__ = "0.1.0"
