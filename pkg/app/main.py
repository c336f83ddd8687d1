"""
Main CLI Application

Entry point for the BV relaxed area toolkit (`bv-relax`, or `python -m app.main`).

Sub-commands:
    area            relaxed area breakdown of a scene file
    tvj             relaxed Jacobian total variation per junction of a scene file
    plateau         certified Plateau bounds for a loop file
    recovery-check  recovery sequence gaps for a straight-jump or n-uple scene
    example         regenerate a named example and compare with its closed form

Exit codes: 0 success, 1 I/O, 2 invalid scene, loop or configuration,
3 numerical failure, 4 unknown example.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from app.commands.area import run_area
from app.commands.common import EXIT_INVALID, CommandConfig, exit_code_for
from app.commands.example import EXAMPLES, run_example
from app.commands.plateau import run_plateau
from app.commands.recovery import run_recovery_check
from app.commands.tvj import run_tvj
from app.core.config import get_settings
from app.core.logging import setup_logging

logger = logging.getLogger(__name__)

HANDLERS: Dict[str, Callable[[CommandConfig], int]] = {
    "area": run_area,
    "tvj": run_tvj,
    "plateau": run_plateau,
    "recovery-check": run_recovery_check,
    "example": run_example,
}


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help=f"quadrature tolerance (default {settings.DEFAULT_TOL:g})")
    common.add_argument("--seed", type=int, help=f"optimizer seed (default {settings.DEFAULT_SEED})")
    common.add_argument("--csv", help="write the result table to this CSV file")
    common.add_argument("--svg", help="write a static SVG figure")
    common.add_argument("--json", dest="json_path", help="write the full record as JSON")
    common.add_argument("--rings", type=int, help=f"Plateau mesh rings (default {settings.MESH_RINGS})")
    common.add_argument("--angular", type=int, help=f"Plateau mesh angular nodes (default {settings.MESH_ANGULAR})")
    common.add_argument("--workers", type=int, help="thread pool size for independent terms")
    common.add_argument("--log-level", help="override LOG_LEVEL for this run")

    parser = argparse.ArgumentParser(prog="bv-relax", description=settings.APP_TITLE)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("area", "relaxed area breakdown of a scene"),
                            ("tvj", "relaxed Jacobian total variation per junction"),
                            ("recovery-check", "strict convergence and area gaps of a recovery sequence")):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("--scene", required=True, help="scene file (bv-relax/1 JSON)")

    cmd = sub.add_parser("plateau", parents=[common], help="certified Plateau bounds for a loop")
    cmd.add_argument("--loop", required=True, help="loop file (bv-relax/1 JSON)")

    cmd = sub.add_parser("example", parents=[common], help=f"named example: {', '.join(EXAMPLES)}")
    cmd.add_argument("example", help="example name")
    cmd.add_argument("--levels", type=int, help="infinite triple point truncation level (default 20)")
    cmd.add_argument("--r", type=float, help="disk radius (default 1)")
    cmd.add_argument("--recovery", action="store_true", help="also run the recovery sequence checks")
    return parser


def config_from_args(args: argparse.Namespace) -> CommandConfig:
    """Only flags given on the command line override the settings defaults"""
    values = {key: value for key, value in vars(args).items()
              if value is not None and key != "log_level" and value is not False}
    return CommandConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level)
    logger.info(f"Starting {get_settings().APP_TITLE} command '{args.command}'")

    try:
        config = config_from_args(args)
    except ValidationError as e:
        logger.error(f"Invalid options: {e}")
        return EXIT_INVALID

    try:
        code = HANDLERS[config.command](config)
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"'{config.command}' failed with exit code {code}: {e}")
        logger.debug("Traceback", exc_info=True)
        return code
    logger.info(f"'{config.command}' finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
