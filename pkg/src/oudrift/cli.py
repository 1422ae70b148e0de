"""Command-line entry point: run experiments, summarize results, emit presets.

Subcommands
-----------
run        execute a sweep from a JSON config file
summarize  aggregate a results CSV by one or more columns
preset     print (or write) the default config for a noise regime

The output directory resolves as --out, then the OUDRIFT_OUT environment
variable, then the config's output_dir field.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiment import (
    config_from_dict,
    config_to_dict,
    regime_preset,
    run_experiment,
    summarize,
)


def _cmd_run(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = config_from_dict(json.load(fh))
    path = run_experiment(cfg, parallel=args.parallel, out_dir=args.out)
    print(path)
    return 0


def _cmd_summarize(args) -> int:
    keys = [k.strip() for k in args.group_by.split(",") if k.strip()]
    report = summarize(args.results, keys)
    json.dump(report, sys.stdout, indent=2)
    print()
    return 0


def _cmd_preset(args) -> int:
    cfg = regime_preset(args.name)
    doc = config_to_dict(cfg)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
        print(args.emit)
    else:
        json.dump(doc, sys.stdout, indent=2)
        print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oudrift",
        description="Low-rank plus sparse drift estimation experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment sweep from a config file")
    p_run.add_argument("--config", required=True, help="JSON experiment config")
    p_run.add_argument("--parallel", type=int, default=1, help="worker processes")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.set_defaults(func=_cmd_run)

    p_sum = sub.add_parser("summarize", help="aggregate a results CSV")
    p_sum.add_argument("--results", required=True, help="results CSV path")
    p_sum.add_argument(
        "--group-by", required=True, help="comma-separated result columns"
    )
    p_sum.set_defaults(func=_cmd_summarize)

    p_pre = sub.add_parser("preset", help="emit a regime's default config")
    p_pre.add_argument(
        "--name",
        required=True,
        help="continuous | bounded | subweibull | polymoment",
    )
    p_pre.add_argument("--emit", default=None, help="write config JSON here")
    p_pre.set_defaults(func=_cmd_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
