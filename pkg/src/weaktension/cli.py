"""Command-line entry point.

    weaktension list
    weaktension run <config.json> [--output PATH] [--format csv|json] [--seed N]
    weaktension run --builtin <name> [...]

Exit codes: 0 success, 2 configuration error, 3 numeric or domain error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .builtins import builtin_text, list_scenarios
from .config import parse_config
from .errors import ConfigError, WeakTensionError
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weaktension", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list builtin scenarios")
    run_p = sub.add_parser("run", help="run a scenario file or a builtin scenario")
    source = run_p.add_mutually_exclusive_group(required=True)
    source.add_argument("config", nargs="?", help="scenario JSON file")
    source.add_argument("--builtin", metavar="NAME", help="name of a builtin scenario")
    run_p.add_argument("--output", metavar="PATH", help="write the table here instead of stdout")
    run_p.add_argument("--format", choices=("csv", "json"), help="output format (overrides the config)")
    run_p.add_argument("--seed", type=int, help="random seed (overrides the config)")
    return parser


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    if args.command == "list":
        for name, description in list_scenarios().items():
            print(f"{name:24s} {description}")
        return EXIT_OK

    try:
        if args.builtin:
            text = builtin_text(args.builtin)
        else:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
        config = parse_config(text)
        if args.seed is not None:
            if "seed" not in config.parameters:
                raise ConfigError(f"kind {config.kind!r} takes no seed")
            config = config.with_seed(args.seed)
    except ConfigError as exc:
        print(f"weaktension: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        table = run(config)
    except WeakTensionError as exc:
        print(f"weaktension: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    text = table.render(args.format or config.output_format)
    path = args.output or config.output_path
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
