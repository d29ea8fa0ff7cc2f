# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Command line entry point `isea-sim`.

Exit status: 0 when everything passed, 1 when an expectation, invariant or
policy check failed, 2 when an input could not be read.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from pyisea.config import SystemConfig, load_config
from pyisea.policy.compiler import compile_to_prs, images_to_json, \
    load_policy_file, validate
from pyisea.policy.core import MatchMode
from pyisea.scenario.fuzz import fuzz
from pyisea.scenario.runner import run_scenario
from pyisea.scenario.script import bundled_scenarios, load_scenario
from pyisea.trace import emit_trace
from pyisea.version import __version__

logger = logging.getLogger("pyisea")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def _config(path: Optional[str]) -> SystemConfig:
    return load_config(path) if path else SystemConfig()


def _mode(text: Optional[str]) -> Optional[MatchMode]:
    return None if text is None else MatchMode.from_text(text)


def cmd_run(args) -> int:
    script = load_scenario(args.scenario)
    result = run_scenario(script, _mode(args.match_mode), args.cycle_limit)
    if args.trace:
        emit_trace(result.trace, args.trace)
    print(result.report.summary())
    return EXIT_OK if result.report.passed else EXIT_FAILED


def cmd_fuzz(args) -> int:
    report = fuzz(_config(args.config), args.seed, args.n, jobs=args.jobs,
                  spoof_all=args.spoof_all, match_mode=_mode(args.match_mode))
    text = json.dumps(report.to_dict(), indent=2)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as report_file:
            report_file.write(text + "\n")
    print(text)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_check_policies(args) -> int:
    config = _config(args.config)
    diags = validate(load_policy_file(args.policies), config,
                     _mode(args.match_mode))
    for diag in diags:
        print(diag)
    errors = sum(1 for d in diags if d.is_error)
    print(f"{errors} errors, {len(diags) - errors} warnings")
    return EXIT_FAILED if errors else EXIT_OK


def cmd_compile_policies(args) -> int:
    config = _config(args.config)
    source = load_policy_file(args.policies)
    mode = _mode(args.match_mode)
    diags = validate(source, config, mode)
    if any(d.is_error for d in diags):
        for diag in diags:
            print(diag, file=sys.stderr)
        return EXIT_FAILED
    text = images_to_json(compile_to_prs(source, config, mode), config)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as out_file:
            out_file.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_list(args) -> int:
    for name in bundled_scenarios():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isea-sim",
        description="Interposer-based security architecture simulator.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for per-cycle detail")
    sub = parser.add_subparsers(dest="command", required=True)
    modes = [mode.value for mode in MatchMode]

    run = sub.add_parser("run", help="run a scenario script")
    run.add_argument("scenario", help="scenario file or bundled name")
    run.add_argument("--trace", help="write the JSONL trace here")
    run.add_argument("--match-mode", choices=modes)
    run.add_argument("--cycle-limit", type=int)
    run.set_defaults(func=cmd_run)

    fz = sub.add_parser("fuzz", help="randomised invariant suite")
    fz.add_argument("--config", help="system config JSON")
    fz.add_argument("--seed", type=int, default=1)
    fz.add_argument("--n", type=int, default=10000,
                    help="number of transfers")
    fz.add_argument("--jobs", type=int, default=1)
    fz.add_argument("--spoof-all", action="store_true",
                    help="spoof the master ID field of every transfer")
    fz.add_argument("--match-mode", choices=modes)
    fz.add_argument("--report", help="also write the JSON report here")
    fz.set_defaults(func=cmd_fuzz)

    for name, func, text in (
            ("check-policies", cmd_check_policies, "validate a policy file"),
            ("compile-policies", cmd_compile_policies,
             "emit per-slave PRS images")):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("policies", help="policy JSON file")
        cmd.add_argument("--config", help="system config JSON")
        cmd.add_argument("--match-mode", choices=modes)
        if func is cmd_compile_policies:
            cmd.add_argument("-o", "--output", help="output file")
        cmd.set_defaults(func=func)

    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO,
             logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"isea-sim: error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
