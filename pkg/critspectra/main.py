"""Command-line entry point for critspectra."""

import argparse
import logging
import sys
import traceback

from critspectra import __version__
from critspectra.config import settings
from critspectra.constants import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ERROR
from critspectra.errors import CritSpectraError
from critspectra.handlers import SUBCOMMANDS


def setup_logging(level: str | None = None) -> None:
    """Configure logging for the toolkit."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
    )
    # Reduce noise from the JIT compiler
    logging.getLogger("numba").setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per subcommand."""
    parser = argparse.ArgumentParser(
        prog="critspectra",
        description="Spectral signatures of criticality in Ising correlation matrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--jobs",
        "-j",
        type=int,
        default=settings.jobs,
        help="parallel worker processes (default: CRITSPECTRA_JOBS or 1)",
    )
    parser.add_argument("--log-level", default=None, help="logging level (default: CRITSPECTRA_LOG_LEVEL)")

    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for module in SUBCOMMANDS:
        module.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    logger = logging.getLogger(__name__)

    if args.jobs < 1:
        logger.error("--jobs must be at least 1, got %d", args.jobs)
        return EXIT_CONFIG_ERROR

    try:
        return args.handler(args)
    except CritSpectraError as error:
        logger.error(
            "%s failed error_type=%s exit_code=%d: %s",
            args.subcommand,
            type(error).__name__,
            error.exit_code,
            error.message,
        )
        return error.exit_code
    except Exception as error:
        logger.error(
            "Unhandled exception error_type=%s traceback_frames=\n%s",
            type(error).__name__,
            "".join(traceback.format_tb(error.__traceback__)).rstrip(),
        )
        return EXIT_NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
