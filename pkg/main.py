import argparse
import json
import sys

from utils.config import get_cfg_default
from utils.errors import (
    DomainError,
    NoBracket,
    NonFinite,
    ParseError,
    SchemaError,
    ToleranceNotMet,
    UnknownParam,
    ValidationError,
)
from utils.logger import setup_logger
from utils.scenario import load_scenario

from runner import Runner

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

INPUT_ERRORS = (DomainError, ParseError, SchemaError, ValidationError, UnknownParam, OSError)
NUMERICAL_ERRORS = (ToleranceNotMet, NoBracket, NonFinite)


def setup_cfg(args):
    cfg = get_cfg_default()
    if args.config:
        cfg.merge_from_file(args.config)
    cfg.merge_from_list(args.opts or [])
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if getattr(args, "json", False):
        cfg.verbose = False
    cfg.freeze()
    return cfg


def run(args):
    cfg = setup_cfg(args)
    if cfg.output_dir is not None:
        setup_logger(cfg.output_dir)
    scenario = load_scenario(args.scenario, default_tol=cfg.tol, default_samples=cfg.samples)

    if cfg.verbose:
        print(f"Scenario: {scenario.name} ({args.scenario})")
        print("** Config **")
        print(cfg)
        print("************")

    runner = Runner(cfg, scenario)
    if args.command == "eval":
        report = runner.evaluate(args.h)
    elif args.command == "solve":
        report = runner.solve()
    elif args.command == "curve":
        runner.curve(args.out, args.samples)
        return EXIT_OK
    elif args.command == "sweep":
        runner.sweep(args.param, args.start, args.stop, args.steps, args.out)
        return EXIT_OK
    else:
        evaluator = runner.verify()
        return EXIT_OK if evaluator.all_passed else EXIT_VERIFY_FAILED

    if args.json:
        print(json.dumps(report, indent=2))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cog", description="Center of gravity of partly filled solids of revolution")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", "-s", type=str, required=True, help="scenario file (JSON)")
    common.add_argument("--config", "-c", type=str, default=None, help="run config file (YAML)")
    common.add_argument("--output-dir", "-o", type=str, default=None, help="directory for log.txt")

    p = sub.add_parser("eval", parents=[common], help="T(h), T'(h), m0 and m1 at one fill level")
    p.add_argument("--h", type=float, required=True, help="fill level")
    p.add_argument("--json", action="store_true", help="print only the JSON report")

    p = sub.add_parser("solve", parents=[common], help="lowest position of the center of gravity")
    p.add_argument("--json", action="store_true", help="print only the JSON report")

    p = sub.add_parser("curve", parents=[common], help="write the T(h) curve as CSV")
    p.add_argument("--out", type=str, required=True, help="CSV file")
    p.add_argument("--samples", type=int, default=None, help="number of levels including both ends")

    p = sub.add_parser("sweep", parents=[common], help="re-solve while varying one scalar")
    p.add_argument("--param", type=str, required=True, help="alpha, beta, M, m, R, H, r or p")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", type=str, required=True, help="CSV file")

    sub.add_parser("verify", parents=[common], help="run the invariant suite; exit 1 on any failure")

    for p in sub.choices.values():
        p.add_argument("opts", default=None, nargs=argparse.REMAINDER,
                       help="modify config options using the command-line")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    stdout = sys.stdout
    try:
        return run(args)
    except NUMERICAL_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        sys.stdout.flush()
        if sys.stdout is not stdout:
            sys.stdout.close()
            sys.stdout = stdout


if __name__ == "__main__":
    sys.exit(main())
