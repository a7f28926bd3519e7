"""qbsim command-line entry point.

Subcommands: ``run`` (execute a preset or config file), ``validate``
(check a config file), ``list-presets``.  Exit codes: 0 success,
1 configuration problem, 2 numerical failure.
"""

import argparse
import dataclasses
import json
import os
import sys

from . import __version__
from .errors import ConfigError, QbsimError
from .experiments import (
    PRESET_NOTES,
    PRESETS,
    parse_config_text,
    parse_overrides,
    config_to_dict,
    run_experiment,
    validate_config,
)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the config-error exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qbsim",
                     description="battery-charger simulation experiments")
    parser.add_argument("--version", action="version",
                        version=f"qbsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    run = sub.add_parser("run", help="run a preset or a config file")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS),
                     help="named experiment bundle")
    src.add_argument("--config", help="key=value config file")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="key=value",
                     help="override a config field (repeatable; applies to "
                          "every member of a preset bundle)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                     help="worker processes for sweep points")

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("config_file")

    sub.add_parser("list-presets", help="show available presets")
    return parser


def _load_configs(args):
    if args.preset:
        configs = list(PRESETS[args.preset])
    else:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        configs = [parse_config_text(text)]
    overrides = parse_overrides(args.overrides)
    if overrides:
        configs = [dataclasses.replace(cfg, **overrides) for cfg in configs]
    for cfg in configs:
        validate_config(cfg)
    return configs


def _cmd_run(args) -> int:
    configs = _load_configs(args)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    os.makedirs(args.out, exist_ok=True)
    all_files, results = [], []
    for cfg in configs:
        files, summary = run_experiment(cfg, args.out, jobs=args.jobs)
        all_files.extend(files)
        results.append(summary)
        for path in files:
            print(path)
    summary_file = os.path.join(args.out, "summary.json")
    with open(summary_file, "w") as fh:
        json.dump({
            "preset": args.preset,
            "version": __version__,
            "configs": [config_to_dict(cfg) for cfg in configs],
            "results": results,
            "files": [os.path.basename(p) for p in all_files],
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(summary_file)
    return 0


def _cmd_validate(args) -> int:
    with open(args.config_file) as fh:
        cfg = parse_config_text(fh.read())
    print(f"OK: {cfg.kind} experiment ({args.config_file})")
    return 0


def _cmd_list_presets(args) -> int:
    for name in sorted(PRESETS):
        members = PRESETS[name]
        kinds = ",".join(dict.fromkeys(c.kind for c in members))
        print(f"{name:8s} {kinds:22s} {PRESET_NOTES[name]}")
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits for usage errors/--version; report instead of dying
        # so embedders always get a return code
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_list_presets(args)
    except ConfigError as exc:
        print(f"qbsim: config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"qbsim: config error: {exc}", file=sys.stderr)
        return 1
    except QbsimError as exc:
        print(f"qbsim: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"qbsim: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
