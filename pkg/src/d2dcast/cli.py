"""Command-line entry point: run a preset or a scenario file to CSV outputs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .scenarios import (
    PRESETS,
    ConfigError,
    Scenario,
    load_scenario,
    preset_scenario,
    run_scenario,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2dcast",
        description=(
            "Simulate an update broadcast session in a LoRaWAN cell and write "
            "raw/aggregate CSV results"
        ),
    )
    parser.add_argument(
        "--scenario",
        default="default",
        help=f"preset name ({', '.join(PRESETS)}) or path to a scenario YAML file",
    )
    parser.add_argument(
        "--scheme",
        nargs="+",
        help="override the scenario's scheme list (e.g. d2d fsf-12 gl-msf)",
    )
    parser.add_argument("--runs", type=int, help="replications per point")
    parser.add_argument("--seed", type=int, help="master seed (overrides config)")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument(
        "--dump-trace",
        action="store_true",
        help="also dump a full per-frame event trace of replication 0",
    )
    parser.add_argument(
        "--dump-slot-plan",
        action="store_true",
        help="also dump the per-frame slot plan of every configuration",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario in PRESETS:
            scenario = preset_scenario(args.scenario)
        elif Path(args.scenario).exists():
            scenario = load_scenario(args.scenario)
        else:
            raise ConfigError(
                f"scenario {args.scenario!r} is neither a preset "
                f"({', '.join(PRESETS)}) nor an existing file"
            )
        if args.scheme:
            scenario = Scenario(
                name=scenario.name,
                config=scenario.config,
                schemes=tuple(args.scheme),
                sweep=scenario.sweep,
                energy_table=scenario.energy_table,
            )
        written = run_scenario(
            scenario,
            master_seed=args.seed,
            out_dir=args.out,
            runs=args.runs,
            dump_trace=args.dump_trace,
            dump_slot_plan=args.dump_slot_plan,
        )
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
