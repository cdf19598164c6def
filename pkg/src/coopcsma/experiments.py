"""Experiment configuration, single simulation cells, and the two study sweeps."""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .engine import CsmaParams, run_csma
from .protocols import COOPMAC, DIRECT_LINK, FAIRMAC, ProtocolConfig, make_protocol
from .topology import (
    RateTable,
    Topology,
    build_rate_table,
    calibrate_power,
    generate_topology,
    load_network,
    read_kv_lines,
)

PAPER_SCALE_COMPETITIONS = 16_000_000

DEFAULTS = {
    "n_nodes": 32,
    "gamma": -3.0,
    "seed": 7,
    "snr_db": [0.0],
    "tau": 0.004,
    "sigma": 0.0088,
    "protocol": FAIRMAC,
    "H": 1,
    "P": 10,
    "Q": 1,
    "competitions": 200_000,
    "replications": 5,
    "energy_budget": 1.0,
    "topology_file": None,
    "output": None,
}

_INT_KEYS = {"n_nodes", "seed", "P", "Q", "competitions", "replications"}
_FLOAT_KEYS = {"gamma", "tau", "sigma", "energy_budget"}
_STR_KEYS = {"protocol", "topology_file", "output"}


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce a study: network source, channel, budget."""

    n_nodes: int = 32
    gamma: float = -3.0
    seed: int = 7
    snr_db: list[float] = field(default_factory=lambda: [0.0])
    tau: float = 0.004
    sigma: float = 0.0088
    protocol: str = FAIRMAC
    H: float = 1
    P: int = 10
    Q: int = 1
    competitions: int = 200_000
    replications: int = 5
    energy_budget: float = 1.0
    topology_file: str | None = None
    output: str | None = None

    def __post_init__(self):
        if self.competitions < 1:
            raise ValueError("competitions must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.snr_db:
            raise ValueError("snr_db sweep list must not be empty")

    def protocol_config(self) -> ProtocolConfig:
        return ProtocolConfig(
            kind=self.protocol,
            max_helpers=self.H,
            max_pending=self.P,
            forward_batch=self.Q,
        )

    def replication_seeds(self) -> list[int]:
        # topology uses `seed` itself; simulations shift by one so the streams differ
        return [self.seed + 1 + rep for rep in range(self.replications)]


def _parse_value(key: str, raw: str):
    if key == "snr_db":
        return [float(part) for part in raw.split(",")]
    if key == "H":
        return math.inf if raw.strip().lower() == "inf" else int(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    return raw


def read_config_values(path: str) -> dict:
    """Read a flat key = value config file; unknown keys are rejected by name."""
    values = {}
    for key, raw in read_kv_lines(path):
        if key not in DEFAULTS:
            raise ValueError(f"unknown config key: {key}")
        values[key] = _parse_value(key, raw)
    return values


def config_from_values(**overrides) -> ExperimentConfig:
    values = dict(DEFAULTS)
    values.update(overrides)
    return ExperimentConfig(**values)


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    values = read_config_values(path)
    if overrides:
        values.update(overrides)
    return config_from_values(**values)


@dataclass
class CellSpec:
    """One (protocol, SNR) cell: shared topology, per-replication seeds."""

    protocol: ProtocolConfig
    snr_db: float
    seeds: list[int]
    competitions: int
    tau: float
    sigma: float
    gamma: float
    positions: np.ndarray | None = None
    explicit_rates: RateTable | None = None
    energy_budget: float = 1.0


@dataclass
class CellResult:
    spec: CellSpec
    rows: list[str]
    rep_mean_throughput: list[float]
    rep_max_bit_cost: list[float]

    @property
    def mean_throughput(self) -> float:
        return float(np.mean(self.rep_mean_throughput))

    @property
    def max_bit_cost(self) -> float:
        return float(np.mean(self.rep_max_bit_cost))


def cell_rates(spec: CellSpec) -> RateTable:
    if spec.explicit_rates is not None:
        return spec.explicit_rates
    topology = Topology(positions=spec.positions, gamma=spec.gamma)
    tx_power = calibrate_power(topology, spec.snr_db)
    return build_rate_table(topology, tx_power)


def run_cell(spec: CellSpec) -> CellResult:
    """Simulate every replication of one cell and emit its CSV rows."""
    rates = cell_rates(spec)
    params = CsmaParams(sigma=spec.sigma, tau=spec.tau)
    h_label = ""
    q_label = ""
    p_label = ""
    if spec.protocol.kind == FAIRMAC:
        h_label = "inf" if spec.protocol.max_helpers == math.inf else str(spec.protocol.max_helpers)
        q_label = str(spec.protocol.forward_batch)
        p_label = str(spec.protocol.max_pending)
    rows: list[str] = []
    rep_s: list[float] = []
    rep_b: list[float] = []
    for seed in spec.seeds:
        protocol = make_protocol(rates, spec.protocol)
        result = run_csma(rates, protocol, params, seed, spec.competitions)
        report = metrics.finalize(result.acc, rates.tx_power)
        meta = {
            "protocol": spec.protocol.kind,
            "H": h_label,
            "Q": q_label,
            "P": p_label,
            "tau": spec.tau,
            "sigma": spec.sigma,
            "snr_db": float(spec.snr_db),
            "seed": seed,
        }
        rows.extend(metrics.csv_rows(report, meta, energy_budget=spec.energy_budget))
        rep_s.append(report.mean_throughput)
        rep_b.append(report.max_bit_cost)
    return CellResult(spec=spec, rows=rows, rep_mean_throughput=rep_s, rep_max_bit_cost=rep_b)


def tradeoff_protocols(max_pending: int) -> list[ProtocolConfig]:
    """The tradeoff-study protocol matrix: references plus fairMAC over Q and H."""
    cells = [ProtocolConfig(DIRECT_LINK), ProtocolConfig(COOPMAC)]
    for helpers in (1, math.inf):
        for batch in range(1, 6):
            cells.append(
                ProtocolConfig(
                    FAIRMAC,
                    max_helpers=helpers,
                    max_pending=max_pending,
                    forward_batch=batch,
                )
            )
    return cells


def lifetime_protocols(config: ExperimentConfig) -> list[ProtocolConfig]:
    """Lifetime-study strategies: Direct Link, CoopMAC, and minimal-NSI fairMAC."""
    return [
        ProtocolConfig(DIRECT_LINK),
        ProtocolConfig(COOPMAC),
        ProtocolConfig(FAIRMAC, max_helpers=1, max_pending=config.P, forward_batch=1),
    ]


def resolve_network(config: ExperimentConfig) -> tuple[np.ndarray | None, RateTable | None]:
    """Positions (to be calibrated per SNR) or an explicit rate table."""
    if config.topology_file:
        topology, rates = load_network(config.topology_file)
        if rates is not None:
            if len(config.snr_db) > 1:
                raise ValueError("explicit rate tables cannot be swept over SNR")
            return (topology.positions if topology else None), rates
        return topology.positions, None
    topology = generate_topology(config.n_nodes, config.seed, config.gamma)
    return topology.positions, None


def build_cells(
    config: ExperimentConfig, protocols: list[ProtocolConfig]
) -> list[CellSpec]:
    positions, explicit = resolve_network(config)
    seeds = config.replication_seeds()
    cells = []
    for snr in config.snr_db:
        for protocol in protocols:
            cells.append(
                CellSpec(
                    protocol=protocol,
                    snr_db=snr,
                    seeds=seeds,
                    competitions=config.competitions,
                    tau=config.tau,
                    sigma=config.sigma,
                    gamma=config.gamma,
                    positions=positions,
                    explicit_rates=explicit,
                    energy_budget=config.energy_budget,
                )
            )
    return cells


def run_cells(cells: list[CellSpec], workers: int = 1) -> list[CellResult]:
    """Run cells (a bounded pool when workers > 1), results in cell order."""
    if workers <= 1 or len(cells) <= 1:
        return [run_cell(spec) for spec in cells]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_cell, cells))


def run_experiment(
    config: ExperimentConfig,
    protocols: list[ProtocolConfig] | None = None,
    workers: int = 1,
) -> list[str]:
    """Simulate every (protocol, SNR, replication) cell; returns CSV lines with header."""
    if protocols is None:
        protocols = [config.protocol_config()]
    results = run_cells(build_cells(config, protocols), workers=workers)
    lines = [metrics.csv_header()]
    for result in results:
        lines.extend(result.rows)
    return lines


LIFETIME_COLUMNS = ["protocol", "snr_db", "throughput", "lifetime", "lifetime_ratio"]


def lifetime_study(
    config: ExperimentConfig,
    workers: int = 1,
) -> list[str]:
    """Lifetime versus effective throughput across the SNR sweep.

    Per cell, the replication-averaged mean throughput S and max bit-cost B
    give lifetime t = W / (B * S); the ratio column compares against Direct
    Link at the same SNR.
    """
    protocols = lifetime_protocols(config)
    cells = build_cells(config, protocols)
    results = run_cells(cells, workers=workers)
    lines = [",".join(LIFETIME_COLUMNS)]
    by_snr: dict[float, list[CellResult]] = {}
    for result in results:
        by_snr.setdefault(result.spec.snr_db, []).append(result)
    for snr in config.snr_db:
        group = by_snr[snr]
        direct = next(r for r in group if r.spec.protocol.kind == DIRECT_LINK)
        direct_lifetime = config.energy_budget / (direct.max_bit_cost * direct.mean_throughput)
        for result in group:
            life = config.energy_budget / (result.max_bit_cost * result.mean_throughput)
            lines.append(
                ",".join(
                    [
                        result.spec.protocol.label(),
                        repr(float(snr)),
                        repr(result.mean_throughput),
                        repr(life),
                        repr(life / direct_lifetime),
                    ]
                )
            )
    return lines
