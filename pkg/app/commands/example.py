"""
Example Command

Regenerates the named examples programmatically and prints comparison tables
against their closed forms:

    triple           triple point with values (0,0), (1,0), (0,1) on B_r
    nuple            five-valued point whose γ̃ winds its inner quadrilateral twice
    butterfly        double butterfly: T₁₂₃ and T₁₄₅ traversed twice, opposite orientations
    infinite-triple  truncations of the map with infinitely many triple points
"""

import logging
import math
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd

from app.commands.common import EXIT_OK, EXIT_UNKNOWN_EXAMPLE, CommandConfig
from app.commands.recovery import check_recovery
from app.geometry.primitives import PiecewiseConstantCircleMap
from app.relaxation.breakdown import n_uple_point_area
from app.relaxation.infinite_triple import infinite_triple_table, triangle_area
from app.scene.library import (
    TRIANGLE_VALUES,
    double_butterfly_values,
    five_point_values,
    infinite_triple_scene,
    n_uple_scene,
)
from app.services.report_writer import write_csv
from app.services.svg_plots import plot_convergence, plot_scene

logger = logging.getLogger(__name__)

TRUNCATION_LEVELS = (1, 2, 5, 10, 20)


def _interval_gap(lower: float, upper: float, target: Optional[float]) -> float:
    """Distance from the closed form to [lower, upper]; NaN when there is no closed form"""
    if target is None:
        return math.nan
    return max(0.0, lower - target, target - upper)


def n_uple_comparison(gamma: PiecewiseConstantCircleMap, r: float, config: CommandConfig,
                      junction_closed_form: Optional[float]) -> pd.DataFrame:
    """
    Computed terms of πr² + r·L(γ) + P̄(γ) against their closed forms.

    Args:
        junction_closed_form: the known P̄(γ); None falls back to the certificate's own closed form
    """
    breakdown = n_uple_point_area(gamma, r, config.area_options())
    cert = breakdown.junction_terms.get("p0")
    if junction_closed_form is None and cert is not None:
        junction_closed_form = cert.closed_form
    if cert is None:
        junction_closed_form = 0.0

    regular = math.pi * r * r
    jump = r * gamma.jump_length()
    total = None if junction_closed_form is None else regular + jump + junction_closed_form
    rows = [
        ("regular", breakdown.regular, breakdown.regular, regular),
        ("jump", breakdown.jump_total, breakdown.jump_total, jump),
        ("junction", breakdown.junction_lower, breakdown.junction_upper, junction_closed_form),
        ("total", breakdown.total_lower, breakdown.total_upper, total),
    ]
    return pd.DataFrame([
        {"quantity": name, "lower": lo, "upper": hi,
         "closed_form": math.nan if target is None else target, "gap": _interval_gap(lo, hi, target)}
        for name, lo, hi, target in rows
    ])


# ============================================================================
# EXAMPLES
# ============================================================================

def _triple(config: CommandConfig) -> pd.DataFrame:
    gamma = PiecewiseConstantCircleMap.uniform(np.array(TRIANGLE_VALUES))
    return n_uple_comparison(gamma, config.r, config, triangle_area(*TRIANGLE_VALUES))


def _nuple(config: CommandConfig) -> pd.DataFrame:
    gamma = PiecewiseConstantCircleMap.uniform(five_point_values())
    return n_uple_comparison(gamma, config.r, config, None)


def _butterfly(config: CommandConfig) -> pd.DataFrame:
    values = double_butterfly_values()
    t123 = triangle_area(values[0], values[1], values[2])
    t145 = triangle_area(values[3], values[4], values[5])
    gamma = PiecewiseConstantCircleMap.uniform(values)
    return n_uple_comparison(gamma, config.r, config, 2.0 * min(t123, t145))


def _infinite_triple(config: CommandConfig) -> pd.DataFrame:
    levels = sorted({n for n in TRUNCATION_LEVELS if n < config.levels} | {config.levels})
    return infinite_triple_table(levels=levels, tol=config.tol)


EXAMPLES: Dict[str, Callable[[CommandConfig], pd.DataFrame]] = {
    "triple": _triple,
    "nuple": _nuple,
    "butterfly": _butterfly,
    "infinite-triple": _infinite_triple,
}

_CIRCLE_DATA: Dict[str, Callable[[], np.ndarray]] = {
    "triple": lambda: np.array(TRIANGLE_VALUES),
    "nuple": five_point_values,
    "butterfly": double_butterfly_values,
}


def run_example(config: CommandConfig) -> int:
    name = config.example or ""
    build = EXAMPLES.get(name)
    if build is None:
        logger.error(f"Unknown example {name!r}; choose one of {', '.join(EXAMPLES)}")
        return EXIT_UNKNOWN_EXAMPLE

    table = build(config)
    print(f"example {name}")
    print(table.to_string(index=False, float_format=lambda v: f"{v:.10g}"))
    if config.csv:
        write_csv(table, config.csv)

    if name not in _CIRCLE_DATA:
        if config.svg:
            plot_scene(infinite_triple_scene(levels=config.levels), config.svg)
        return EXIT_OK
    scene = n_uple_scene(PiecewiseConstantCircleMap.uniform(_CIRCLE_DATA[name]()), config.r, name=name)
    if config.svg:
        plot_scene(scene, config.svg)
    if config.recovery:
        report, scales = check_recovery(scene, config)
        print(report.summary())
        if config.csv:
            write_csv(report.table, config.csv.with_name(f"{config.csv.stem}_recovery.csv"))
        if config.svg:
            plot_convergence(report, config.svg.with_name(f"{config.svg.stem}_recovery.svg"), scales,
                             title=f"{name} recovery")
    return EXIT_OK
