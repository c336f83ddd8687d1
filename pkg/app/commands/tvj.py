"""
TVJ Command

Relaxed Jacobian total variation at every junction of a piecewise constant
scene, and their sum.
"""

import logging

from app.commands.common import EXIT_OK, CommandConfig
from app.relaxation.breakdown import scene_tvj, tvj_rows
from app.scene.io import load_scene
from app.services.report_writer import as_frame, write_csv, write_json

logger = logging.getLogger(__name__)


def run_tvj(config: CommandConfig) -> int:
    scene = load_scene(config.require("scene"))
    certificates = scene_tvj(scene, config.area_options())
    rows = tvj_rows(certificates)
    if not certificates:
        logger.info(f"Scene '{scene.name}' has no junctions; relaxed TVJ is 0")

    print(f"{scene.name}: relaxed TVJ per junction")
    print(as_frame(rows).to_string(index=False, float_format=lambda v: f"{v:.10g}"))

    if config.csv:
        write_csv(rows, config.csv)
    if config.json_path:
        write_json({key: c.to_record(key).model_dump() for key, c in certificates.items()}, config.json_path)
    return EXIT_OK
