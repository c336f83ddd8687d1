"""
Plateau Command

Certified bounds for the Plateau problem of a loop file.
"""

import logging

from app.commands.common import EXIT_OK, CommandConfig
from app.plateau.certificate import plateau_certify
from app.scene.io import load_loop
from app.services.report_writer import write_csv, write_json
from app.services.svg_plots import plot_loop

logger = logging.getLogger(__name__)


def run_plateau(config: CommandConfig) -> int:
    path = config.require("loop")
    loop = load_loop(path)
    cert = plateau_certify(loop, config.plateau_options())

    print(f"{path.name}: P in [{cert.lower:.10g}, {cert.upper:.10g}] via {cert.upper_method} (gap {cert.gap:.3g})")
    if cert.closed_form is not None:
        print(f"  closed form ({cert.closed_form_kind}) {cert.closed_form:.10g}")
    if not cert.converged:
        print("  optimizer did not converge; upper bound is the best iterate")

    if config.csv:
        write_csv([{"lower": cert.lower, "upper": cert.upper, "method": cert.upper_method}], config.csv)
    if config.json_path:
        write_json(cert.to_record(path.stem), config.json_path)
    if config.svg:
        plot_loop(loop, config.svg, title=path.stem)
    return EXIT_OK
