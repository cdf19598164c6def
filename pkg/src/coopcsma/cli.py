"""Command-line driver: topology tools, analytic tables, simulations, sweeps."""

from __future__ import annotations

import argparse
import math
import sys

from . import experiments, metrics, roundrobin
from .engine import CsmaParams, run_csma
from .protocols import FAIRMAC, make_protocol
from .topology import (
    Topology,
    build_rate_table,
    calibrate_power,
    generate_topology,
    load_network,
    save_network,
)

LIFETIME_SWEEP_DB = [float(x) for x in range(0, 21, 2)]


def _load_config(args, **extra) -> experiments.ExperimentConfig:
    values = experiments.read_config_values(args.config) if args.config else {}
    values.update(extra)
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    if getattr(args, "competitions", None) is not None:
        values["competitions"] = args.competitions
    if getattr(args, "paper_scale", False):
        values["competitions"] = experiments.PAPER_SCALE_COMPETITIONS
    return experiments.config_from_values(**values)


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _ensure_writable(path: str | None) -> None:
    """Fail at startup, not after a long run, when the output cannot be written."""
    if path is None or path == "-":
        return
    try:
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise OSError(f"cannot write output file: {exc}") from exc


def _network_for(config: experiments.ExperimentConfig, snr_db: float):
    """Rate table for one SNR point, from the config's network source."""
    positions, explicit = experiments.resolve_network(config)
    if explicit is not None:
        return explicit
    topology = Topology(positions=positions, gamma=config.gamma)
    return build_rate_table(topology, calibrate_power(topology, snr_db))


def cmd_topology(args) -> int:
    if args.network:
        topology, rates = load_network(args.network)
        n = topology.n_nodes if topology else rates.n_nodes
        print(f"nodes: {n}")
        if topology is not None:
            print(f"gamma: {topology.gamma}")
            distances = topology.ap_distances()
            print(f"max AP distance: {distances.max():.6f}")
            for k, ((x, y), d) in enumerate(zip(topology.positions, distances)):
                print(f"node {k}: pos=({x:.6f}, {y:.6f}) d_ap={d:.6f}")
        if rates is not None:
            print(f"tx_power: {rates.tx_power}")
            for k in range(rates.n_nodes):
                print(f"node {k}: direct rate {float(rates.direct[k]):.6f}")
        return 0
    config = _load_config(args)
    topology = generate_topology(config.n_nodes, config.seed, config.gamma)
    rates = None
    if args.snr_db is not None:
        rates = build_rate_table(topology, calibrate_power(topology, args.snr_db))
    if args.out:
        save_network(args.out, topology, rates)
        print(f"wrote {topology.n_nodes}-node topology to {args.out}")
    else:
        for k, (x, y) in enumerate(topology.positions):
            print(f"node {k}: ({x!r}, {y!r})")
    return 0


def cmd_analytic(args) -> int:
    if args.network:
        _, rates = load_network(args.network)
        if rates is None:
            raise ValueError(f"{args.network} holds no rate table; add rates or use --config")
    else:
        config = _load_config(args)
        rates = _network_for(config, config.snr_db[0])
    assignment = roundrobin.rr_best_assignment(rates)
    figures = roundrobin.rr_metrics(rates, assignment)
    s = roundrobin.travel_times(rates, assignment)
    t = roundrobin.transmission_times(rates, assignment)
    print(
        f"{'node':>4} {'route':>8} {'travel_time':>12} {'tx_time':>12} "
        f"{'throughput':>12} {'bit_cost':>12}"
    )
    lines = ["node_id,route,travel_time,transmission_time,throughput,bit_cost"]
    for k in range(rates.n_nodes):
        h = assignment.routes[k]
        route = "direct" if h is None else f"via {h}"
        print(
            f"{k:>4} {route:>8} {float(s[k]):>12.6f} {float(t[k]):>12.6f} "
            f"{float(figures.throughput):>12.6f} {float(figures.bit_cost[k]):>12.6f}"
        )
        lines.append(
            f"{k},{route.replace(' ', '')},{float(s[k])!r},{float(t[k])!r},"
            f"{float(figures.throughput)!r},{float(figures.bit_cost[k])!r}"
        )
    if args.out:
        _write_lines(args.out, lines)
    return 0


def cmd_simulate(args) -> int:
    config = _load_config(args)
    _ensure_writable(args.out or config.output)
    _ensure_writable(args.trace)
    snr = config.snr_db[0]
    rates = _network_for(config, snr)
    protocol_config = config.protocol_config()
    params = CsmaParams(sigma=config.sigma, tau=config.tau)
    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        rows = [metrics.csv_header()]
        for seed in config.replication_seeds():
            protocol = make_protocol(rates, protocol_config)
            observer = None
            if trace_fh is not None:
                trace_fh.write(f"# replication seed={seed} protocol={protocol_config.label()}\n")
                for hl in getattr(protocol, "helper_lists", []):
                    helpers = ",".join(str(h) for h in hl.helpers) if hl.helpers else "-"
                    trace_fh.write(f"# helpers {hl.source}: {helpers}\n")

                def observer(record, outcome, fh=trace_fh):
                    fh.write(record.line() + "\n")

            result = run_csma(rates, protocol, params, seed, config.competitions, observer=observer)
            report = metrics.finalize(result.acc, rates.tx_power)
            meta = {
                "protocol": protocol_config.kind,
                "H": ("inf" if protocol_config.max_helpers == math.inf else protocol_config.max_helpers)
                if protocol_config.kind == FAIRMAC
                else "",
                "Q": protocol_config.forward_batch if protocol_config.kind == FAIRMAC else "",
                "P": protocol_config.max_pending if protocol_config.kind == FAIRMAC else "",
                "tau": config.tau,
                "sigma": config.sigma,
                "snr_db": float(snr),
                "seed": seed,
            }
            rows.extend(metrics.csv_rows(report, meta, energy_budget=config.energy_budget))
    finally:
        if trace_fh is not None:
            trace_fh.close()
    _write_lines(args.out or config.output, rows)
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    _ensure_writable(args.out or config.output)
    lines = experiments.run_experiment(
        config,
        protocols=experiments.tradeoff_protocols(config.P),
        workers=args.workers,
    )
    _write_lines(args.out or config.output, lines)
    return 0


def cmd_lifetime(args) -> int:
    extra = {}
    values = experiments.read_config_values(args.config) if args.config else {}
    if "snr_db" not in values:
        extra["snr_db"] = LIFETIME_SWEEP_DB
    config = _load_config(args, **extra)
    _ensure_writable(args.out or config.output)
    lines = experiments.lifetime_study(config, workers=args.workers)
    _write_lines(args.out or config.output, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopcsma",
        description="Cooperative slotted-CSMA uplink simulator (Direct Link, CoopMAC, fairMAC)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, competitions=False, trace=False, workers=False):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output file (default stdout)")
        if competitions:
            p.add_argument("--competitions", type=int, help="channel-competition budget")
            p.add_argument(
                "--paper-scale",
                action="store_true",
                help=f"use the full {experiments.PAPER_SCALE_COMPETITIONS} competition budget",
            )
        if trace:
            p.add_argument("--trace", help="write a line-per-event trace to this file")
        if workers:
            p.add_argument("--workers", type=int, default=1, help="parallel cell workers")

    p = sub.add_parser("topology", help="generate or inspect a topology file")
    common(p)
    p.add_argument("--network", help="inspect an existing topology/rates file")
    p.add_argument("--snr-db", type=float, help="embed calibrated rates for this SNR")
    p.set_defaults(func=cmd_topology)

    p = sub.add_parser("analytic", help="closed-form Round-Robin table for a network")
    common(p)
    p.add_argument("--network", help="topology/rates file to analyze")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="run one protocol cell and emit metrics CSV")
    common(p, competitions=True, trace=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="tradeoff study over the protocol matrix")
    common(p, competitions=True, workers=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lifetime", help="lifetime study over an SNR sweep")
    common(p, competitions=True, workers=True)
    p.set_defaults(func=cmd_lifetime)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
