"""
Area Command

Relaxed area of a scene file: summary to standard output, one CSV row,
optional JSON record and SVG partition picture.
"""

import logging

from app.commands.common import EXIT_OK, CommandConfig
from app.relaxation.breakdown import relaxed_area_bv
from app.scene.io import load_scene
from app.services.report_writer import write_csv, write_json
from app.services.svg_plots import plot_scene

logger = logging.getLogger(__name__)


def run_area(config: CommandConfig) -> int:
    scene = load_scene(config.require("scene"))
    breakdown = relaxed_area_bv(scene, config.area_options())
    print(breakdown.summary())

    if config.csv:
        write_csv([breakdown.to_row()], config.csv)
    if config.json_path:
        write_json(breakdown.to_record(), config.json_path)
    if config.svg:
        plot_scene(scene, config.svg)
    return EXIT_OK
