"""Recovery Package

Recovery sequences for the relaxed area and the checks that witness their
strict convergence and the convergence of their areas.
"""

from app.recovery.checks import (
    ConvergenceReport,
    area_convergence_check,
    fitted_rate,
    graph_area,
    l1_distance,
    recovery_report,
    recovery_tv,
    slice_gap,
    strict_convergence_check,
)
from app.recovery.maps import (
    NUpleRecovery,
    RecoveryMap,
    StraightJumpRecovery,
    gamma_k,
    n_uple_recovery,
    n_uple_sequence,
    straight_jump_recovery,
    straight_jump_sequence,
    window_mask,
)

__all__ = [
    "ConvergenceReport",
    "NUpleRecovery",
    "RecoveryMap",
    "StraightJumpRecovery",
    "area_convergence_check",
    "fitted_rate",
    "gamma_k",
    "graph_area",
    "l1_distance",
    "n_uple_recovery",
    "n_uple_sequence",
    "recovery_report",
    "recovery_tv",
    "slice_gap",
    "straight_jump_recovery",
    "straight_jump_sequence",
    "strict_convergence_check",
    "window_mask",
]
