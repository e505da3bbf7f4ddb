"""Command-line entry point.

    vqalab <subcommand> --config <path.json> --out <path.csv> [--threads N] [--seed S]

Subcommands: variance, grad-variance, learn, cknorm, pauli-dist, verify.
Exit codes: 0 success, 1 config error, 2 any verify-suite failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import ConfigError, ExperimentConfig, run_experiment, write_csv

SUBCOMMANDS = ["variance", "grad-variance", "learn", "cknorm", "pauli-dist", "verify"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqalab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_file(args.config)
        if cfg.experiment != args.command:
            raise ConfigError(
                f"config experiment {cfg.experiment!r} does not match subcommand {args.command!r}"
            )
        if args.seed is not None:
            cfg.seed = args.seed
        rows, columns = run_experiment(cfg, threads=args.threads)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_csv(rows, columns, args.out)
    if cfg.experiment == "verify" and any(row.get("pass") is False for row in rows):
        failed = sum(1 for row in rows if row.get("pass") is False)
        print(f"verify: {failed} of {len(rows)} checks failed", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
