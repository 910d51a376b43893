"""
Command line entry point.

Exit status: 0 when every gated verdict passes, 1 when one fails, 2 on a
configuration or runtime error.
"""

import argparse
import sys
from collections.abc import Sequence
from typing import Any

from .core.config import ArithmeticMode, settings
from .core.exceptions import LabError
from .core.logger import get_logger
from .experiments.config_loader import load_config
from .experiments.runner import ingest, recheck, run
from .schemas.experiment import RunRecord

logger = get_logger(__name__)

EXPERIMENTS = ("entropy-dichotomy", "perturb-witness", "smb", "hoeffding", "invariance")

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML experiment config; defaults are used when omitted")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help=f"results root (default {settings.RESULTS_DIR})")
    parser.add_argument("--jobs", type=int, help="worker processes")
    parser.add_argument("--time-budget", type=float, dest="time_budget_s", help="seconds before a partial stop")
    parser.add_argument("--no-plots", action="store_false", dest="plots", default=None, help="skip charts")
    arithmetic = parser.add_mutually_exclusive_group()
    arithmetic.add_argument("--exact", action="store_const", const=ArithmeticMode.EXACT.value, dest="arithmetic")
    arithmetic.add_argument("--float", action="store_const", const=ArithmeticMode.FLOAT.value, dest="arithmetic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zel", description=settings.APP_DESCRIPTION)
    verbs = parser.add_subparsers(dest="verb", required=True)
    for experiment in EXPERIMENTS:
        _add_run_options(verbs.add_parser(experiment, help=f"run the {experiment} experiment"))
    ingest_parser = verbs.add_parser("ingest", help="add a symbol sequence file to the entropy dichotomy")
    ingest_parser.add_argument("sequence", help="symbols separated by whitespace or commas")
    _add_run_options(ingest_parser)
    recheck_parser = verbs.add_parser("recheck", help="recompute verdicts from a finished run directory")
    recheck_parser.add_argument("directory")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = ("seed", "out", "jobs", "time_budget_s", "plots", "arithmetic")
    return {key: getattr(args, key) for key in keys}


def report(record: RunRecord) -> None:
    for verdict in record.verdicts:
        status = "PASS" if verdict.passed else "FAIL"
        marker = "" if verdict.gated else " (info)"
        print(f"{status} {verdict.name}{marker}: {verdict.detail}")
    partial = " partial" if record.partial else ""
    print(f"{record.experiment}{partial} run {record.run_id} hash {record.config_hash[:12]}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "recheck":
            record = recheck(args.directory)
        elif args.verb == "ingest":
            cfg = load_config(args.config, "entropy-dichotomy", _overrides(args))
            record = ingest(args.sequence, cfg)  # type: ignore[arg-type]
        else:
            record = run(load_config(args.config, args.verb, _overrides(args)))
    except LabError as exc:
        logger.error("command failed", extra={"verb": args.verb, "error_code": exc.error_code})
        print(f"error {exc.error_code}: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    report(record)
    return EXIT_PASSED if record.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
