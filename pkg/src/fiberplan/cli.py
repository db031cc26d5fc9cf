"""Command-line interface.

    fiberplan validate --config scenario.json
    fiberplan design   --config scenario.json [--algorithm mst|pcst|both]
    fiberplan report   --config scenario.json [--out DIR]
    fiberplan mc       --config scenario.json [--seed N] [--draws N]

Exit codes: 0 success, 2 configuration, 3 input data, 4 solver,
5 output, 1 unexpected.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import __version__
from .config import ScenarioConfig, load_scenario
from .errors import ConfigError, FiberPlanError
from .netdesign import NodeRole, classify_nodes
from .pipeline import (
    PipelineResult,
    build_demand,
    emit_outputs,
    load_inputs,
    run_monte_carlo,
    run_pipeline,
)

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiberplan",
        description="Plan fiber-to-the-neighborhood networks and report "
        "per-decile cost, emissions, and social carbon cost.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "check the scenario and its input files, write nothing"),
        ("design", "solve the networks and write design GeoJSONs"),
        ("report", "full pipeline: demand, designs, and the decile report"),
        ("mc", "report plus Monte Carlo parameter sensitivity"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="scenario JSON path")
        cmd.add_argument(
            "--algorithm",
            choices=("mst", "pcst", "both"),
            help="override the scenario's algorithm selection",
        )
        cmd.add_argument("--out", help="override the scenario's output directory")
        cmd.add_argument("--seed", type=int, help="override the Monte Carlo seed")
        cmd.add_argument("--draws", type=int, help="override the Monte Carlo draw count")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        cfg = load_scenario(
            args.config,
            algorithm=args.algorithm,
            out_dir=args.out,
            seed=args.seed,
            draws=args.draws,
        )
        if args.command == "validate":
            return _cmd_validate(cfg)
        if args.command == "design":
            return _cmd_design(cfg)
        if args.command == "report":
            return _cmd_report(cfg)
        return _cmd_mc(cfg)
    except FiberPlanError as exc:
        print(
            json.dumps(
                {
                    "error": type(exc).__name__,
                    "exit_code": exc.exit_code,
                    "message": str(exc),
                }
            ),
            file=sys.stderr,
        )
        return exc.exit_code


def _cmd_validate(cfg: ScenarioConfig) -> int:
    inputs = load_inputs(cfg)
    stage = build_demand(cfg, inputs)
    classification = classify_nodes(
        inputs.settlements,
        inputs.fiber,
        buffer_km=cfg.buffer_km,
        main_settlement_threshold=cfg.main_settlement_threshold,
    )
    role_counts = {role.value: 0 for role in NodeRole}
    for role in classification.roles.values():
        role_counts[role.value] += 1
    regions = {s.region_id for s in inputs.settlements}
    print(f"scenario ok: {len(inputs.settlements)} settlements, "
          f"{len(regions)} regions, {len(stage.records)} subregions")
    print(f"roles: {role_counts['core_adjacent']} core-adjacent, "
          f"{role_counts['regional']} regional, {role_counts['access']} access")
    print(f"potential users: {stage.total_users:.6g} "
          f"(adoption {cfg.adoption_rate:.4g} above {cfg.min_density_per_km2:.6g}/km2)")
    print(f"algorithms: {', '.join(cfg.algorithms)}")
    for warning in stage.warnings:
        print(f"warning: {warning}")
    if classification.regions_without_candidate:
        flagged = ", ".join(classification.regions_without_candidate)
        print(f"warning: regions without a main-settlement candidate: {flagged}")
    return 0


def _cmd_design(cfg: ScenarioConfig) -> int:
    result = run_pipeline(cfg)
    written = emit_outputs(cfg, result, designs_only=True)
    _print_designs(result)
    _print_written(written, result.warnings)
    return 0


def _cmd_report(cfg: ScenarioConfig) -> int:
    result = run_pipeline(cfg)
    written = emit_outputs(cfg, result)
    _print_designs(result)
    _print_rows(result)
    _print_written(written, result.warnings)
    return 0


def _cmd_mc(cfg: ScenarioConfig) -> int:
    if cfg.mc is None:
        raise ConfigError("mc needs a monte_carlo section in the scenario config")
    result = run_pipeline(cfg)
    mc_rows = run_monte_carlo(cfg, result)
    written = emit_outputs(cfg, result, mc_rows=mc_rows)
    _print_designs(result)
    _print_rows(result)
    print(f"monte carlo: {cfg.mc.draws} draws, seed {cfg.mc.seed}, "
          f"{len(cfg.mc.distributions)} varied parameters")
    _print_written(written, result.warnings)
    return 0


def _print_designs(result: PipelineResult) -> None:
    for (selection, level), designs in sorted(result.designs.items()):
        for design_result in designs:
            design = design_result.design
            dropped = len(design.excluded_terminals)
            print(
                f"{selection} {level} @{design_result.root_id}: "
                f"{design.terminal_node_count} nodes, "
                f"{design.total_length_km:.6g} km"
                + (f", {dropped} excluded" if dropped else "")
            )


def _print_rows(result: PipelineResult) -> None:
    print(f"{'decile':>6} {'level':>8} {'algorithm':>9} {'users':>10} "
          f"{'km':>10} {'tco/user/mo':>12} {'kg/user':>10} {'scc/user':>10}")
    for row in result.rows:
        monthly = "-" if row.monthly_tco_per_user_usd is None else f"{row.monthly_tco_per_user_usd:.2f}"
        kg = "-" if row.per_user_kg_co2e is None else f"{row.per_user_kg_co2e:.2f}"
        scc_user = "-" if row.scc_per_user_usd is None else f"{row.scc_per_user_usd:.2f}"
        print(
            f"{row.decile:>6} {row.level:>8} {row.algorithm:>9} {row.users:>10.6g} "
            f"{row.total_length_km:>10.6g} {monthly:>12} {kg:>10} {scc_user:>10}"
        )
    print(f"total users: {result.total_users:.6g}")


def _print_written(written: Sequence[str], warnings: Sequence[str]) -> None:
    for warning in warnings:
        print(f"warning: {warning}")
    for path in written:
        print(f"wrote {path}")


if __name__ == "__main__":
    sys.exit(main())
