"""Command-line interface: graph generation, experiment runs, property checks."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import InvalidParameterError, SdneigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdneig",
        description="Distributed eigenvector computation on spatially distributed networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random geometric graph file")
    p_gen.add_argument("--n", type=int, required=True, help="number of vertices")
    p_gen.add_argument("--seed", type=int, default=0, help="graph seed")
    p_gen.add_argument("--out", required=True, help="output graph JSON path")

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("--config", required=True, help="experiment config JSON path")
    p_run.add_argument("--trials", type=int, help="override the trial count from the config")
    p_run.add_argument("--out", help="override the CSV output path from the config")

    p_check = sub.add_parser("check", help="run a named property suite")
    from .checks import SUITES

    p_check.add_argument("--suite", required=True, choices=SUITES)
    p_check.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad arguments; report those as validation
        # errors (exit 1) and reserve 2 for property failures
        return 1 if exc.code else 0
    try:
        if args.command == "gen":
            from .experiment import cmd_gen

            info = cmd_gen(args.n, args.seed, args.out)
            print(f"wrote {info['out']}: n={info['n']} edges={info['edges']} "
                  f"mean_degree={info['mean_degree']:.3f}")
            return 0
        if args.command == "run":
            from .experiment import ExperimentConfig, cmd_run

            cfg = ExperimentConfig.load(args.config)
            if args.trials is not None:
                if args.trials < 1:
                    raise InvalidParameterError("trials must be >= 1")
                cfg.trials = args.trials
            if args.out is not None:
                cfg.out = args.out
            info = cmd_run(cfg)
            print(f"wrote {info['out']} (summary: {info['summary']})")
            return 0
        if args.command == "check":
            from .checks import run_suite

            report = run_suite(args.suite, args.seed)
            print(json.dumps(report, indent=2))
            return 0 if report["passed"] else 2
    except (SdneigError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
