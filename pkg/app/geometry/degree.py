"""
Degree of Circle Maps

Lifts the angle of a sampled circle map around a point and counts turns.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import AmbiguousDegree, OriginHit
from app.geometry.primitives import Point2, SampledCircleMap, TWO_PI

logger = logging.getLogger(__name__)

_INCREMENT_MARGIN = 1e-9


def lifted_increments(values: np.ndarray, origin: np.ndarray) -> np.ndarray:
    """Wrapped angle increments between consecutive (cyclic) samples around origin"""
    rel = values - origin
    angles = np.arctan2(rel[:, 1], rel[:, 0])
    steps = np.diff(np.concatenate([angles, angles[:1]]))
    return (steps + math.pi) % TWO_PI - math.pi


def circle_map_degree(circle_map: SampledCircleMap, origin=(0.0, 0.0),
                      origin_tol: Optional[float] = None) -> int:
    """
    Degree of a sampled circle map around a point.

    Args:
        circle_map: samples of φ: 𝕊¹ → ℝ²
        origin: point the turns are counted around
        origin_tol: minimum admissible sample distance to origin (default ORIGIN_TOL)

    Returns:
        int: total lifted angle divided by 2π

    Raises:
        OriginHit: a sample lies within origin_tol of origin
        AmbiguousDegree: a consecutive angular increment reaches π
    """
    tol = get_settings().ORIGIN_TOL if origin_tol is None else origin_tol
    o = Point2.of(origin).as_array()
    values = circle_map.values

    dist = np.hypot(*(values - o).T)
    hit = np.flatnonzero(dist < tol)
    if hit.size:
        raise OriginHit(
            f"sample {hit[0]} at angle {circle_map.angles[hit[0]]:.6g} is within {tol:g} of the origin"
        )

    increments = lifted_increments(values, o)
    worst = int(np.argmax(np.abs(increments)))
    if abs(increments[worst]) >= math.pi - _INCREMENT_MARGIN:
        raise AmbiguousDegree(
            f"angular increment {increments[worst]:.6g} after sample {worst} is not below π; "
            f"resample the map more finely"
        )

    turns = math.fsum(increments) / TWO_PI
    degree = int(round(turns))
    logger.debug(f"Degree lift: turns={turns:.12g} -> {degree}")
    return degree
