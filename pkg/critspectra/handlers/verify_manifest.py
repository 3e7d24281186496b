"""`critspectra verify-manifest`: re-hash the artifacts of a finished run."""

import argparse
import logging

from critspectra.constants import EXIT_OK
from critspectra.errors import PreconditionError
from critspectra.storage import verify_manifest

logger = logging.getLogger(__name__)


def verify_manifest_command(args: argparse.Namespace) -> int:
    problems = verify_manifest(args.manifest)
    for problem in problems:
        logger.error("Manifest check failed: %s", problem)
    if problems:
        raise PreconditionError(f"{len(problems)} problem(s) in {args.manifest}")
    logger.info("Manifest verified path=%s", args.manifest)
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify-manifest", help="check artifact hashes and config digest")
    parser.add_argument("manifest", help="manifest.json of a run")
    parser.set_defaults(handler=verify_manifest_command)
