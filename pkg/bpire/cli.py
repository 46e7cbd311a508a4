"""Command line for bpire."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, NoReturn

import colorlog

from .const import (
    _LOGGER,
    BUDGETS,
    DEFAULT_SEED,
    ENV_SEED,
    EXIT_USAGE,
    TOOL_VERSION,
)
from .coordinator import SUBCOMMANDS, ExperimentCoordinator
from .exceptions import RunFailedError
from .utils import build_data_and_options

if TYPE_CHECKING:
    from collections.abc import Sequence

LOG_FORMAT = "%(log_color)s%(asctime)s %(levelname)-8s%(reset)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors exit with the toolkit's usage code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def setup_logging(verbosity: int) -> None:
    """Colored stream handler on the package logger; -v debug, -q warnings only."""
    level = logging.INFO
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT, datefmt="%H:%M:%S"))
    _LOGGER.handlers.clear()
    _LOGGER.addHandler(handler)
    _LOGGER.setLevel(level)
    _LOGGER.propagate = False


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="preset name (ENV-A..E, SITES-A..C) or YAML model file")
    common.add_argument(
        "--out",
        type=Path,
        default=Path("bpire-out"),
        help="output directory, or a .json or .csv file for the main output",
    )
    common.add_argument("--seed", type=int, default=None, help=f"master seed (env {ENV_SEED} wins)")
    common.add_argument("--workers", type=int, default=None, help="worker processes")
    common.add_argument("--budget", choices=sorted(BUDGETS), default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("-q", "--quiet", action="count", default=0)

    parser = _Parser(prog="bpire", description="Branching processes in random environment.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    sub.add_parser("kappa", parents=[common], help="Cramer root and tilted law")

    simulate = sub.add_parser("simulate", parents=[common], help="stationary batch")
    simulate.add_argument("--count", type=int)
    simulate.add_argument("--burn-in", dest="burn_in", type=int)

    tails = sub.add_parser("tails", parents=[common], help="Hill, plateau, tail process")
    tails.add_argument("--count", type=int)
    tails.add_argument("--hill-k", dest="hill_k", type=int)
    tails.add_argument("--lag", type=int)

    extremes = sub.add_parser("extremes", parents=[common], help="extremal index and maxima")
    extremes.add_argument("--n", type=int)
    extremes.add_argument("--reps", type=int)
    extremes.add_argument("--theta-reps", dest="theta_reps", type=int)
    extremes.add_argument("--block-length", dest="block_length", type=int)
    extremes.add_argument("--c", type=float, help="Goldie constant, estimated when omitted")

    sums = sub.add_parser("sums", parents=[common], help="stable and Gaussian partial sums")
    sums.add_argument("--n", type=int)
    sums.add_argument("--reps", type=int)
    sums.add_argument("--theta-reps", dest="theta_reps", type=int)
    sums.add_argument("--c", type=float)

    rwre = sub.add_parser("rwre", parents=[common], help="random walk in random environment")
    rwre.add_argument("--n", dest="walk_n", type=int)
    rwre.add_argument("--reps", dest="walk_reps", type=int)
    rwre.add_argument("--transform-t", dest="transform_t", type=int)
    rwre.add_argument("--c", type=float)

    report = sub.add_parser("report", parents=[common], help="acceptance suite for a preset")
    report.add_argument("--preset", help="same as --model")

    compare = sub.add_parser("compare", parents=[common], help="side by side results of one model")
    compare.add_argument("reports", nargs="+", type=Path, help="JSON reports to compare")
    return parser


def _resolve_seed(flag: int | None) -> int:
    env = os.environ.get(ENV_SEED)
    if env:
        try:
            return int(env)
        except ValueError:
            _LOGGER.warning("ignoring non-integer %s=%r", ENV_SEED, env)
    return DEFAULT_SEED if flag is None else flag


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose - args.quiet)

    combined: dict[str, Any] = {
        k: v
        for k, v in vars(args).items()
        if k not in ("subcommand", "model", "out", "verbose", "quiet", "preset", "reports")
    }
    combined["seed"] = _resolve_seed(args.seed)
    flags, options = build_data_and_options(combined)
    model = args.model or getattr(args, "preset", None)

    try:
        coordinator = ExperimentCoordinator(args.out, **options)
        if args.subcommand == "compare":
            outcome = coordinator.compare(args.reports)
        else:
            outcome = coordinator.run(args.subcommand, model, flags)
    except RunFailedError as exception:
        _LOGGER.error("%s", exception)  # noqa: TRY400
        return exception.exit_code
    if outcome.checks:
        failed = [check.name for check in outcome.checks if not check.passed]
        if failed:
            _LOGGER.error("acceptance failed: %s", ", ".join(failed))
        else:
            _LOGGER.info("all %s acceptance checks passed", len(outcome.checks))
    for path in outcome.files:
        _LOGGER.info("wrote %s", path)
    return outcome.exit_code


__all__ = ["SUBCOMMANDS", "build_parser", "main", "setup_logging"]
