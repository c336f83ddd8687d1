"""Relaxation Package

Relaxed area 𝒜̄_BV of piecewise Lipschitz maps: regular term, jump walls and
junction Plateau terms, the n-uple point and TVJ specializations, and the
infinite triple point report.
"""

from app.relaxation.breakdown import (
    AreaBreakdown,
    AreaOptions,
    n_uple_point_area,
    relaxed_area_bv,
    relaxed_tvj,
    scene_tvj,
    tvj_rows,
)
from app.relaxation.infinite_triple import (
    InfiniteTripleReport,
    infinite_triple_point_report,
    infinite_triple_table,
    l1_upper_bound,
    triangle_area,
)
from app.relaxation.terms import jump_surface_integrand, jump_term, jump_terms, jump_tv, regular_term

__all__ = [
    "AreaBreakdown",
    "AreaOptions",
    "InfiniteTripleReport",
    "infinite_triple_point_report",
    "infinite_triple_table",
    "jump_surface_integrand",
    "jump_term",
    "jump_terms",
    "jump_tv",
    "l1_upper_bound",
    "n_uple_point_area",
    "regular_term",
    "relaxed_area_bv",
    "relaxed_tvj",
    "scene_tvj",
    "triangle_area",
    "tvj_rows",
]
