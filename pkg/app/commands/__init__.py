"""Commands Package

One handler per sub-command of the `bv-relax` CLI, sharing `CommandConfig`.
"""

from app.commands.area import run_area
from app.commands.common import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_UNKNOWN_EXAMPLE,
    CommandConfig,
    exit_code_for,
)
from app.commands.example import EXAMPLES, run_example
from app.commands.plateau import run_plateau
from app.commands.recovery import check_recovery, recovery_family, run_recovery_check
from app.commands.tvj import run_tvj

__all__ = [
    "EXAMPLES",
    "EXIT_INVALID",
    "EXIT_IO",
    "EXIT_NUMERICAL",
    "EXIT_OK",
    "EXIT_UNKNOWN_EXAMPLE",
    "CommandConfig",
    "check_recovery",
    "exit_code_for",
    "recovery_family",
    "run_area",
    "run_example",
    "run_plateau",
    "run_recovery_check",
    "run_tvj",
]
