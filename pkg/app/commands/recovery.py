"""
Recovery Check Command

Recognizes straight-jump and homogeneous n-uple scenes, builds the matching
recovery family and reports strict-convergence and area gaps per element.
"""

import logging
from typing import List, Tuple

from app.commands.common import EXIT_OK, CommandConfig
from app.core.exceptions import InvalidScene
from app.recovery.checks import ConvergenceReport, recovery_report
from app.recovery.maps import RecoveryMap, n_uple_sequence, straight_jump_sequence
from app.relaxation.breakdown import n_uple_point_area, relaxed_area_bv
from app.scene.io import load_scene
from app.scene.library import n_uple_circle_data
from app.scene.model import Scene
from app.services.report_writer import write_csv
from app.services.svg_plots import plot_convergence

logger = logging.getLogger(__name__)

EPS_SCHEDULE = (1e-1, 1e-2, 1e-3)
K_SCHEDULE = (10, 40, 160)


def recovery_family(scene: Scene, config: CommandConfig) -> Tuple[List[RecoveryMap], float]:
    """
    The recovery sequence for a recognized scene and its relaxed area.

    Raises:
        InvalidScene: neither a straight jump nor a homogeneous n-uple point
    """
    kind = scene.metadata.get("kind")
    if kind == "straight-jump":
        sequence = straight_jump_sequence(scene, EPS_SCHEDULE)
        return sequence, relaxed_area_bv(scene, config.area_options()).total
    if kind == "n-uple":
        gamma, r, center = n_uple_circle_data(scene)
        sequence = n_uple_sequence(gamma, r, K_SCHEDULE, config.plateau_options(), center)
        return sequence, n_uple_point_area(gamma, r, config.area_options()).total
    raise InvalidScene(f"scene '{scene.name}' (kind {kind!r}) has no known recovery sequence; "
                       f"expected 'straight-jump' or 'n-uple'")


def check_recovery(scene: Scene, config: CommandConfig) -> Tuple[ConvergenceReport, List[float]]:
    sequence, formula = recovery_family(scene, config)
    logger.info(f"Checking {len(sequence)} recovery maps of '{scene.name}' against area {formula:.12g}")
    report = recovery_report(sequence, scene, formula, config.tol)
    return report, [m.scale for m in sequence]


def run_recovery_check(config: CommandConfig) -> int:
    scene = load_scene(config.require("scene"))
    report, scales = check_recovery(scene, config)
    print(f"{scene.name}: recovery sequence")
    print(report.summary())

    if config.csv:
        write_csv(report.table, config.csv)
    if config.svg:
        plot_convergence(report, config.svg, scales, title=scene.name)
    return EXIT_OK
