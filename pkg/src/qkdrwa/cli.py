"""Command-line entry point: ``qkdrwa <subcommand> [--config F] [--out D] [--seed S] [--threads N]``.

Subcommands
    gen-topology  write the campaign's random topologies as adjacency files
    run           one (request count, classical load) point
    sweep         blocking ratio and QSNR over the configured request counts
    mixed-sweep   fixed request count, classical load varied
    calibrate     print the solved N_f and gamma_nl and the plug-back QSNRs

Without ``--config`` the shipped default campaign is used. Exit status is 0
only when every output file was written.
"""

from __future__ import annotations

import argparse
import enum
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .channel import CALIBRATION_ISOLATED_KM, CALIBRATION_SHARED_KM, CalibrationError, calibration_check
from .config import U64_MAX, CampaignConfig, ConfigError, load_campaign, parse_config
from .output import emit_results
from .simulation import run_mixed_sweep, run_sweep
from .topology import TopologyError, write_topology

__all__ = ["CliConfig", "Subcommand", "emit_results", "main", "parse_config"]


class Subcommand(str, enum.Enum):
    GEN_TOPOLOGY = "gen-topology"
    RUN = "run"
    SWEEP = "sweep"
    MIXED_SWEEP = "mixed-sweep"
    CALIBRATE = "calibrate"


@dataclass(frozen=True)
class CliConfig:
    subcommand: Subcommand
    config_path: Path | None
    output_dir: Path
    seed_override: int | None = None
    threads: int = 1
    requests: int | None = None
    load: float | None = None
    index: int | None = None


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkdrwa", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="campaign TOML file (default: shipped config)")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    common.add_argument("--seed", type=_u64, default=None, help="override the campaign seed")
    common.add_argument("--threads", type=_positive, default=1, help="worker processes (default: 1)")

    gen = sub.add_parser(Subcommand.GEN_TOPOLOGY.value, parents=[common], help="write random topologies")
    gen.add_argument("--index", type=int, default=None, help="only this topology index")
    run = sub.add_parser(Subcommand.RUN.value, parents=[common], help="simulate a single point")
    run.add_argument("--requests", type=_positive, default=None, help="request count (default: largest configured)")
    run.add_argument("--load", type=_fraction, default=None, help="classical load (default: configured)")
    sub.add_parser(Subcommand.SWEEP.value, parents=[common], help="request-count sweep")
    sub.add_parser(Subcommand.MIXED_SWEEP.value, parents=[common], help="classical-load sweep")
    sub.add_parser(Subcommand.CALIBRATE.value, parents=[common], help="solve and check the noise calibration")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    return CliConfig(
        Subcommand(ns.subcommand),
        ns.config,
        ns.out,
        ns.seed,
        ns.threads,
        getattr(ns, "requests", None),
        getattr(ns, "load", None),
        getattr(ns, "index", None),
    )


def _gen_topology(cfg: CliConfig, campaign: CampaignConfig) -> None:
    scenario = campaign.scenario
    indices = range(scenario.topology_count) if cfg.index is None else [cfg.index]
    if cfg.index is not None and cfg.index < 0:
        raise TopologyError("--index must be non-negative")
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    for i in indices:
        graph = scenario.topology(i)
        target = cfg.output_dir / f"topology_{i}.txt"
        write_topology(graph, target)
        print(f"{target}: {graph.n_nodes} nodes, {len(graph.links)} links")


def _calibrate(campaign: CampaignConfig) -> None:
    params = campaign.scenario.channel_base.calibrate()
    isolated, shared = calibration_check(params)
    print(f"length_metric      {params.length_metric.value}")
    print(f"n_fixed            {params.n_fixed:.10g}")
    print(f"gamma_nl           {params.gamma_nl:.10g}")
    print(f"qsnr_isolated_db   {isolated:.6f}  ({CALIBRATION_ISOLATED_KM:g} km, no interferer)")
    print(f"qsnr_shared_db     {shared:.6f}  ({CALIBRATION_SHARED_KM:g} km, one classical channel)")


def execute(cfg: CliConfig) -> int:
    campaign = load_campaign(cfg.config_path, cfg.seed_override)
    scenario = campaign.scenario
    if cfg.subcommand is Subcommand.CALIBRATE:
        _calibrate(campaign)
        return 0
    if cfg.subcommand is Subcommand.GEN_TOPOLOGY:
        _gen_topology(cfg, campaign)
        return 0
    if cfg.subcommand is Subcommand.RUN:
        point = replace(
            scenario,
            request_counts=(cfg.requests or max(scenario.request_counts),),
            classical_load=scenario.classical_load if cfg.load is None else cfg.load,
        )
        result = run_sweep(point, threads=cfg.threads)
    elif cfg.subcommand is Subcommand.SWEEP:
        result = run_sweep(scenario, threads=cfg.threads)
    else:
        mixed = campaign.mixed
        result = run_mixed_sweep(scenario, mixed.total_requests, mixed.load_points, threads=cfg.threads)
    for target in emit_results(result, cfg.output_dir):
        print(target)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_args(argv)
    try:
        return execute(cfg)
    except (ConfigError, CalibrationError, TopologyError, OSError, ValueError) as exc:
        print(f"qkdrwa: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1


if __name__ == "__main__":
    sys.exit(main())
