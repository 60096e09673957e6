"""Command-line grammar of the channel-model toolkit."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from chanmodel import __version__

SUBCOMMANDS = ("eval", "losprob", "bpl", "fit", "fit-los", "cluster", "stats", "drop", "catalog")


def _common_parser() -> argparse.ArgumentParser:
    """Flags every subcommand accepts."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Master random seed (generated and reported when omitted)",
    )
    common.add_argument(
        "--config",
        type=Path,
        default=None,
        help="JSON or YAML configuration file; flags override its values",
    )
    common.add_argument(
        "-o",
        "--out",
        type=Path,
        default=None,
        help="Path where the result is written (default: stdout)",
    )
    common.add_argument(
        "--format",
        choices=("csv", "json"),
        default="csv",
        help="Output format (default: csv)",
    )
    common.add_argument(
        "--dump-config",
        nargs="?",
        const="-",
        metavar="FILE",
        help="Dump the resolved configuration as YAML to FILE (or stdout if not specified)",
    )
    common.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging output",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase verbosity (can be used multiple times)",
    )
    common.add_argument(
        "--log-level",
        default=None,
        help="Set logging level (e.g., info, debug, warning)",
    )
    return common


def _add_distance_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--dist", type=float, nargs="+", help="2D distances in meters")
    group.add_argument(
        "--dist-range",
        type=float,
        nargs=3,
        metavar=("START", "STOP", "COUNT"),
        help="COUNT distances from START to STOP meters (log-spaced unless --linear)",
    )
    parser.add_argument(
        "--linear",
        action="store_true",
        default=None,
        help="Space --dist-range linearly instead of logarithmically",
    )


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the CLI."""
    parser = argparse.ArgumentParser(
        prog="chanmodel",
        description="Evaluate, fit and simulate mmWave path loss, LOS probability, "
        "penetration loss and ray clustering.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
        help="Show program's version number and exit",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("eval", parents=[common], help="Evaluate a path loss model")
    p.add_argument("--model", choices=("ci", "cif", "abg"), default=None, help="Model family")
    p.add_argument("--scenario", default=None, help="Catalog scenario, e.g. uma-nlos")
    p.add_argument("--n", type=float, default=None, help="Path loss exponent (CI, CIF)")
    p.add_argument("--b", type=float, default=None, help="Frequency-dependence slope (CIF)")
    p.add_argument("--f0", type=float, default=None, help="Centroid frequency in GHz (CIF)")
    p.add_argument("--alpha", type=float, default=None, help="Distance slope (ABG)")
    p.add_argument("--beta", type=float, default=None, help="Offset in dB (ABG)")
    p.add_argument("--gamma", type=float, default=None, help="Frequency slope (ABG)")
    p.add_argument("--freq", type=float, nargs="+", default=None, help="Frequencies in GHz")
    _add_distance_flags(p)

    p = sub.add_parser("losprob", parents=[common], help="Evaluate a LOS probability model")
    p.add_argument(
        "--model", default=None, help="d1d2, nyu_squared or 3gpp_uma (default: d1d2)"
    )
    p.add_argument(
        "--environment", default=None, help="uma, umi-sc or umi-os; picks the default (d1, d2)"
    )
    p.add_argument("--d1", type=float, default=None, help="Breakpoint d1 in meters")
    p.add_argument("--d2", type=float, default=None, help="Decay distance d2 in meters")
    p.add_argument("--h-ut", type=float, default=None, help="UE height in meters (3gpp_uma)")
    _add_distance_flags(p)

    p = sub.add_parser("bpl", parents=[common], help="Evaluate building penetration and O2I loss")
    p.add_argument("--class", dest="bpl_class", default=None, help="low, high or both")
    p.add_argument("--freq", type=float, nargs="+", default=None, help="Frequencies in GHz")
    p.add_argument("--depth", type=float, default=None, help="Indoor depth in meters")
    p.add_argument("--angle", type=float, default=None, help="Incidence angle from the normal")

    p = sub.add_parser("fit", parents=[common], help="Fit a path loss model to samples")
    p.add_argument("--input", type=Path, default=None, help="Path loss samples CSV")
    p.add_argument("--model", choices=("ci", "cif", "abg"), default=None, help="Model family")
    p.add_argument(
        "--los-filter", choices=("los", "nlos", "all"), default=None, help="LOS state to fit"
    )

    p = sub.add_parser("fit-los", parents=[common], help="Fit a LOS probability model")
    p.add_argument("--input", type=Path, default=None, help="LOS observations CSV")
    p.add_argument("--model", default=None, help="d1d2 or nyu_squared (default: d1d2)")
    p.add_argument("--bin-width", type=float, default=None, help="Distance bin width in meters")
    p.add_argument(
        "--compare",
        action="store_true",
        default=None,
        help="Compare 3GPP defaults, fitted d1/d2 and fitted NYU squared",
    )
    p.add_argument("--environment", default=None, help="Environment of the 3GPP reference row")

    p = sub.add_parser("cluster", parents=[common], help="Cluster rays with K-power-means")
    p.add_argument("--rays", type=Path, default=None, help="Ray CSV")
    p.add_argument("--link", default=None, help="Only cluster the rays of this link_id")
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--zeta", type=float, default=None, help="Delay weight of the MCD")
    p.add_argument("--prune-p", type=float, default=None, help="Ray-count fraction kept")
    p.add_argument("--prune-s", type=float, default=None, help="Power fraction kept")
    p.add_argument("--max-iter", type=int, default=None)

    p = sub.add_parser("stats", parents=[common], help="Delay/angle spreads and XPR of rays")
    p.add_argument("--rays", type=Path, default=None, help="Ray CSV")
    p.add_argument("--clusters", type=Path, default=None, help="Cluster assignment CSV")
    p.add_argument("--link", default=None, help="Only use the rays of this link_id")

    p = sub.add_parser("drop", parents=[common], help="Run a Monte-Carlo drop")
    p.add_argument("--map", type=Path, default=None, help="Building map JSON (los_mode: map)")
    p.add_argument("--ue-count", type=int, default=None, help="Number of UEs")
    p.add_argument(
        "--percentiles", type=float, nargs="+", default=None, help="Coupling-loss percentiles"
    )

    p = sub.add_parser("catalog", parents=[common], help="Print the published parameters")
    p.add_argument(
        "--los-models",
        action="store_true",
        default=None,
        help="Print the LOS probability model comparison instead",
    )

    return parser


def configure_logging(args: argparse.Namespace) -> None:
    """Set the root log level from --debug, -v and --log-level."""
    log_level = logging.WARNING
    if args.debug:
        log_level = logging.DEBUG
    elif args.verbose == 1:
        log_level = logging.INFO
    elif args.verbose >= 2:
        log_level = logging.DEBUG
    if args.log_level:
        log_level = getattr(logging, args.log_level.upper(), log_level)
    logging.basicConfig(
        level=log_level,
        format="[%(levelname)s] %(message)s",
        force=True,
    )


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return create_parser().parse_args(argv)
