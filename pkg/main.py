import argparse
import asyncio
import sys
from typing import List, Optional

from app.config import config
from app.logger import define_log_level, logger
from app.schema import CHANNEL_VALUES, FORMAT_VALUES, ValidationSuite
from app.tool import ToolResult, default_commands


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causal-switch",
        description="Holevo capacity of depolarising channels in a quantum switch.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)
    about = {tool.name: tool.description for tool in default_commands()}

    sweep = commands.add_parser(
        "sweep", help="write a capacity sweep as CSV", description=about["sweep"]
    )
    sweep.add_argument("--q-min", type=float)
    sweep.add_argument("--q-max", type=float)
    sweep.add_argument("--steps", type=int)
    sweep.add_argument("--gamma", type=float)
    sweep.add_argument("--visibility", type=float)
    sweep.add_argument("--visibility-err", type=float)
    sweep.add_argument("--measurements")
    sweep.add_argument("--out", required=True)

    reconstruct = commands.add_parser(
        "reconstruct",
        help="capacity rebuilt from measured coherences",
        description=about["reconstruct"],
    )
    reconstruct.add_argument("--measurements")
    reconstruct.add_argument("--q", type=float, required=True)
    reconstruct.add_argument("--gamma", type=float, default=0.5)
    reconstruct.add_argument("--format", choices=FORMAT_VALUES, default="text")
    reconstruct.add_argument(
        "--samples", type=int, default=0, help="Monte Carlo resamples (>= 100)"
    )

    validate = commands.add_parser(
        "validate", help="run invariant suites", description=about["validate"]
    )
    validate.add_argument(
        "suite",
        nargs="?",
        default=ValidationSuite.ALL.value,
        choices=[suite.value for suite in ValidationSuite],
    )
    validate.add_argument(
        "--channel", choices=CHANNEL_VALUES, help="limit the cptp suite to one channel family"
    )

    plot = commands.add_parser(
        "plot", help="render a sweep CSV as SVG", description=about["plot"]
    )
    plot.add_argument("--in", dest="source", required=True)
    plot.add_argument("--out", required=True)
    return parser


def _tool_input(args: argparse.Namespace) -> dict:
    values = vars(args).copy()
    values.pop("command")
    values.pop("verbose")
    return {key: value for key, value in values.items() if value is not None}


async def run(args: argparse.Namespace) -> ToolResult:
    if args.verbose:
        define_log_level(print_level="DEBUG", logfile_level=config.logging.logfile_level)
    return await default_commands().execute(args.command, _tool_input(args))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = asyncio.run(run(args))
    except KeyboardInterrupt:
        logger.warning("Operation interrupted.")
        return 130

    if result.output:
        print(result.output)
    if result.error:
        logger.error(result.error)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
