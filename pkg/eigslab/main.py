"""
eigslab - command-line entry point

Structure:
- validate    - Canonicality and distance-positivity report
- build       - Materialise level n (summary, JSON or DOT)
- matrices    - Mass, degree and distance matrices with spectral radii
- psi         - Perron eigenpair and trace of the renormalisation map
- resistance  - Effective resistance on a built level
- dims        - Dimension report of one system
- table1      - Dimension table of the bundled systems
- walk        - Exit, commute, return-probability and trace experiments
- perc        - Percolation on the diamond hierarchical lattice
"""
import argparse
import logging
import sys
import traceback

from . import __version__
from .config import DEFAULT_WORKERS, EDGE_CAP, OUTPUT_DIR, set_verbosity
from .commands import (
    register_core,
    register_spectral,
    register_resistance,
    register_dims,
    register_walk,
    register_perc,
)
from .exceptions import EigsLabError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigslab",
        description="Edge iterated graph systems: construction, dimensions, random walks and DHL percolation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="parallel workers for Monte Carlo")
    parser.add_argument("--edge-cap", type=int, default=EDGE_CAP, help="refuse to build levels above this size")
    parser.add_argument("--output-dir", default=OUTPUT_DIR, help="where manifests of stdout runs go")

    subparsers = parser.add_subparsers(dest="command", required=True)

    # validate, build
    register_core(subparsers)

    # matrices
    register_spectral(subparsers)

    # psi, resistance
    register_resistance(subparsers)

    # dims, table1
    register_dims(subparsers)

    # walk
    register_walk(subparsers)

    # perc alpha | exact | dims | moments | dispersion
    register_perc(subparsers)

    return parser


def dispatch(argv: list[str]) -> int:
    """Parse argv, run the subcommand and map errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 on usage errors
        return 0 if e.code in (0, None) else 2

    set_verbosity(args.verbose)
    args.argv = ["eigslab", *argv]
    if getattr(args, "perc_command", None):
        args.command = f"perc-{args.perc_command}"
    if args.workers < 1:
        print("eigslab: --workers must be >= 1", file=sys.stderr)
        return 2

    logger.debug("=== DISPATCH ===")
    logger.debug(f"Command: {args.command}")
    logger.debug(f"Arguments: {vars(args)}")

    try:
        return args.func(args)
    except EigsLabError as e:
        logger.error(f"=== {type(e).__name__.upper()} ===")
        logger.error(e.detail)
        print(f"eigslab: {e.detail}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error("=== UNHANDLED EXCEPTION ===")
        logger.error(f"Command: {args.command}")
        logger.error(f"Exception type: {type(e).__name__}")
        logger.error(f"Exception message: {str(e)}")
        logger.error(f"Traceback: {traceback.format_exc()}")
        print(f"eigslab: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(dispatch(sys.argv[1:]))
