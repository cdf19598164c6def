"""Node placement, transmit power calibration, and link rate tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Nodes closer than this to the AP are re-drawn: the rate model diverges at
# distance zero.
MIN_AP_DISTANCE = 1e-9


def _origin() -> np.ndarray:
    return np.zeros(2)


@dataclass
class Topology:
    """Node coordinates inside the closed unit disk, access point at the center."""

    positions: np.ndarray  # shape (n_nodes, 2)
    gamma: float
    ap_position: np.ndarray = field(default_factory=_origin)

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.ap_position = np.asarray(self.ap_position, dtype=float)
        if self.positions.size == 0:
            raise ValueError("topology needs at least one node")
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError("positions must be an (n, 2) array of coordinates")
        if np.any(self.ap_distances() > 1.0 + 1e-12):
            raise ValueError("all nodes must lie inside the closed unit disk around the AP")

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    def ap_distances(self) -> np.ndarray:
        return np.linalg.norm(self.positions - self.ap_position, axis=1)

    def pair_distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=2)


@dataclass
class RateTable:
    """Achievable rates in nats per time unit.

    `direct[k]` is the node-to-AP rate of node k, `pairwise[k, l]` the rate
    from node k to node l. The diagonal of `pairwise` is unused. Entries may
    be floats or exact `fractions.Fraction` values (the analytic module keeps
    rational inputs rational).
    """

    direct: np.ndarray
    pairwise: np.ndarray
    tx_power: float = 1.0

    def __post_init__(self):
        self.direct = np.asarray(self.direct)
        self.pairwise = np.asarray(self.pairwise)
        n = self.direct.shape[0]
        if self.pairwise.shape != (n, n):
            raise ValueError("pairwise rate matrix must be square and match direct rates")
        for value in self.direct:
            _check_rate(value)
        for k in range(n):
            for l in range(n):
                if k != l:
                    _check_rate(self.pairwise[k, l])
        if not self.tx_power > 0:
            raise ValueError("tx_power must be positive")

    @property
    def n_nodes(self) -> int:
        return self.direct.shape[0]


def _check_rate(value) -> None:
    as_float = float(value)
    if not (as_float > 0 and math.isfinite(as_float)):
        raise ValueError(f"rates must be strictly positive and finite, got {value!r}")


def generate_topology(n_nodes: int, seed: int, gamma: float) -> Topology:
    """Drop `n_nodes` uniformly on the unit disk, reproducibly for a fixed seed.

    Sampling is polar with radius sqrt(u) so the density is uniform over the
    disk area. The generator is numpy's PCG64, whose stream is stable across
    numpy releases; a golden topology file in the test suite pins the
    seed-to-positions mapping.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random((n_nodes, 2))
    radius = np.sqrt(u[:, 0])
    angle = 2.0 * math.pi * u[:, 1]
    positions = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    # Re-draw (in node-id order, so still deterministic) the measure-zero case
    # of a node essentially on top of the AP.
    for k in range(n_nodes):
        while math.hypot(positions[k, 0], positions[k, 1]) < MIN_AP_DISTANCE:
            u2 = rng.random(2)
            r = math.sqrt(u2[0])
            a = 2.0 * math.pi * u2[1]
            positions[k] = (r * math.cos(a), r * math.sin(a))
    return Topology(positions=positions, gamma=gamma)


def calibrate_power(topology: Topology, target_snr_db: float) -> float:
    """Transmit power that puts the farthest node at `target_snr_db` at the AP.

    Receiver noise has unit variance, so SNR_k = E * d_k**gamma.
    """
    d_max = float(np.max(topology.ap_distances()))
    return 10.0 ** (target_snr_db / 10.0) * d_max ** (-topology.gamma)


def build_rate_table(topology: Topology, tx_power: float) -> RateTable:
    """Rate table R = ln(1 + SNR) for every node-to-AP and node-to-node link."""
    if not tx_power > 0:
        raise ValueError("tx_power must be positive")
    ap_d = topology.ap_distances()
    pair_d = topology.pair_distances()
    n = topology.n_nodes
    if np.any(ap_d <= 0):
        raise ValueError("invalid topology: node placed exactly on the AP")
    off_diag = ~np.eye(n, dtype=bool)
    if np.any(pair_d[off_diag] <= 0):
        raise ValueError("invalid topology: coincident node positions give an infinite rate")
    direct = np.log1p(tx_power * ap_d**topology.gamma)
    pairwise = np.full((n, n), np.nan)
    pairwise[off_diag] = np.log1p(tx_power * pair_d[off_diag] ** topology.gamma)
    return RateTable(direct=direct, pairwise=pairwise, tx_power=tx_power)


def load_rates(direct, pairwise, tx_power: float = 1.0) -> RateTable:
    """Wrap explicitly given rates verbatim (used to encode small hand-built networks)."""
    n = len(direct)
    direct_arr = np.empty(n, dtype=object)
    for k, value in enumerate(direct):
        direct_arr[k] = value
    pair_arr = np.empty((n, n), dtype=object)
    for k in range(n):
        row = pairwise[k]
        if len(row) != n:
            raise ValueError("pairwise rate matrix must be square")
        for l in range(n):
            pair_arr[k, l] = row[l] if k != l else None
    return RateTable(direct=direct_arr, pairwise=pair_arr, tx_power=tx_power)


# --- text serialization -----------------------------------------------------
#
# Line-oriented key = value format, '#' comments and blank lines ignored.
# Keys:
#   n_nodes   = <int>                       (required)
#   gamma     = <float>                     (required with positions)
#   position  = <x>, <y>                    (one line per node, node-id order)
#   tx_power  = <float>                     (required with rates)
#   rate_direct = <r_0>, ..., <r_{n-1}>     (node-to-AP rates)
#   rate_pair = <k>, <l>, <rate>            (one line per ordered pair k != l)
# A file may hold positions, explicit rates, or both.


def read_kv_lines(path: str) -> list[tuple[str, str]]:
    """Parse a key = value text file into an ordered list of (key, value)."""
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            pairs.append((key.strip(), value.strip()))
    return pairs


def save_network(path: str, topology: Topology | None = None, rates: RateTable | None = None) -> None:
    """Write a topology and/or its rate table to a replayable text file."""
    if topology is None and rates is None:
        raise ValueError("nothing to save")
    n = topology.n_nodes if topology is not None else rates.n_nodes
    if topology is not None and rates is not None and rates.n_nodes != n:
        raise ValueError("topology and rate table disagree on the number of nodes")
    lines = [f"n_nodes = {n}"]
    if topology is not None:
        lines.append(f"gamma = {float(topology.gamma)!r}")
        for x, y in topology.positions:
            lines.append(f"position = {float(x)!r}, {float(y)!r}")
    if rates is not None:
        lines.append(f"tx_power = {rates.tx_power!r}")
        lines.append("rate_direct = " + ", ".join(repr(float(r)) for r in rates.direct))
        for k in range(n):
            for l in range(n):
                if k != l:
                    lines.append(f"rate_pair = {k}, {l}, {float(rates.pairwise[k, l])!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_network(path: str) -> tuple[Topology | None, RateTable | None]:
    """Read a file written by `save_network` (or hand-written in the same format)."""
    pairs = read_kv_lines(path)
    known = {"n_nodes", "gamma", "position", "tx_power", "rate_direct", "rate_pair"}
    scalars: dict[str, str] = {}
    positions: list[tuple[float, float]] = []
    pair_rates: list[tuple[int, int, float]] = []
    for key, value in pairs:
        if key not in known:
            raise ValueError(f"unknown topology file key: {key}")
        if key == "position":
            x, y = (float(part) for part in value.split(","))
            positions.append((x, y))
        elif key == "rate_pair":
            k_s, l_s, r_s = value.split(",")
            pair_rates.append((int(k_s), int(l_s), float(r_s)))
        else:
            scalars[key] = value
    if "n_nodes" not in scalars:
        raise ValueError("topology file is missing n_nodes")
    n = int(scalars["n_nodes"])

    topology = None
    if positions:
        if len(positions) != n:
            raise ValueError(f"expected {n} position lines, found {len(positions)}")
        if "gamma" not in scalars:
            raise ValueError("topology file with positions is missing gamma")
        topology = Topology(positions=np.asarray(positions), gamma=float(scalars["gamma"]))

    rates = None
    if "rate_direct" in scalars:
        direct = [float(part) for part in scalars["rate_direct"].split(",")]
        if len(direct) != n:
            raise ValueError(f"expected {n} direct rates, found {len(direct)}")
        seen = {(k, l) for k, l, _ in pair_rates}
        missing = [(k, l) for k in range(n) for l in range(n) if k != l and (k, l) not in seen]
        if missing:
            raise ValueError(f"rate_pair lines missing for node pairs, e.g. {missing[0]}")
        pairwise = [[None] * n for _ in range(n)]
        for k, l, r in pair_rates:
            pairwise[k][l] = r
        tx_power = float(scalars.get("tx_power", "1.0"))
        rates = load_rates(direct, pairwise, tx_power=tx_power)
    elif pair_rates:
        raise ValueError("rate_pair lines require a rate_direct line")

    if topology is None and rates is None:
        raise ValueError("topology file holds neither positions nor rates")
    return topology, rates
