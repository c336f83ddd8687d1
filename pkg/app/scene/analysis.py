"""
Scene Analysis

Total variation of a piecewise Lipschitz map, circular slices, and the
junction traces γ^i_ρ(ν) = u(p_i + ρν) with their limits as ρ → 0.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import BallTooLarge, InvalidGeometry
from app.geometry.maps import AffineMap, ConstantMap, PlanarMap, RadialAngularMap, gradient_norm
from app.geometry.primitives import TWO_PI, PiecewiseConstantCircleMap, SampledCircleMap, curve_tv
from app.geometry.quadrature import quadrature_1d, quadrature_2d
from app.geometry.regions import DiskRegion
from app.geometry.winding import min_edge_distance
from app.scene.model import Scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JunctionTrace:
    """Samples of u on ∂B_ρ(p_i) and the limiting piecewise constant data"""
    junction_id: str
    rho: float
    samples: SampledCircleMap
    limit: PiecewiseConstantCircleMap
    limit_method: str  # "closed-form", "richardson" or "mixed"


# ============================================================================
# JUNCTION TRACES
# ============================================================================

def _check_ball(scene: Scene, index: int, rho: float) -> None:
    junction = scene.junctions[index]
    p = np.asarray(junction.point)
    domain = scene.domain
    if isinstance(domain, DiskRegion):
        inside = math.hypot(*(p - np.asarray(domain.center))) + rho <= domain.radius + 1e-12
    else:
        samples = domain.boundary_samples(4096)
        samples = samples[np.all(np.isfinite(samples), axis=1)]
        inside = bool(domain.contains([p])[0]) and float(
            min_edge_distance(p[None, :], samples[:-1], samples[1:])[0]
        ) >= rho
    if not inside:
        raise BallTooLarge(f"junction {junction.id}: B_ρ with ρ={rho:.6g} leaves the domain")

    incident = set(scene.incident_curves(junction))
    for k, curve in enumerate(scene.jump_curves):
        if k in incident:
            continue
        line = curve.alpha.polyline(max_segment=0.25 * rho)
        if float(min_edge_distance(p[None, :], line[:-1], line[1:])[0]) <= rho:
            raise BallTooLarge(
                f"junction {junction.id}: B_ρ with ρ={rho:.6g} meets non-incident curve {curve.id}"
            )


def _sector_limit(region_map: PlanarMap, point: np.ndarray, direction: np.ndarray, rho: float):
    """Limit of u(p + tν) as t → 0 inside one sector, with the method used"""
    if isinstance(region_map, ConstantMap):
        return np.asarray(region_map.value), "closed-form"
    if isinstance(region_map, AffineMap):
        return region_map.matrix @ point + region_map.offset, "closed-form"
    if isinstance(region_map, RadialAngularMap) and np.allclose(region_map.center, point, atol=1e-12):
        theta = math.atan2(direction[1], direction[0]) % TWO_PI
        return region_map.profile.evaluate(np.array([theta]))[0], "closed-form"
    # u(p + tν) = β + c1 t + c2 t² + O(t³): eliminate c1 and c2
    samples = point + np.outer([rho, rho / 2.0, rho / 4.0], direction)
    values = region_map.evaluate(samples)
    return values[0] / 3.0 - 2.0 * values[1] + 8.0 * values[2] / 3.0, "richardson"


def junction_trace(scene: Scene, index: int, rho: float, n_samples: int = 256) -> JunctionTrace:
    """
    Trace of u on the circle ∂B_ρ(p_i) and its limit as ρ → 0.

    The limit keeps the declared sector angles; each sector value is taken in
    closed form for constant, affine and centered radial regions, and by
    Richardson extrapolation over ρ, ρ/2, ρ/4 otherwise.

    Args:
        scene: the scene
        index: junction index
        rho: ball radius
        n_samples: uniform samples on the circle

    Returns:
        JunctionTrace: samples and limiting circle data

    Raises:
        BallTooLarge: the ball leaves the domain or meets a non-incident curve
    """
    if rho <= 0:
        raise InvalidGeometry("trace radius must be positive")
    junction = scene.junctions[index]
    _check_ball(scene, index, rho)
    p = np.asarray(junction.point)

    theta = np.arange(n_samples) * (TWO_PI / n_samples)
    ring = p + rho * np.column_stack([np.cos(theta), np.sin(theta)])
    samples = SampledCircleMap(theta, scene.evaluate(ring))

    mids = junction.sector_midangles()
    directions = np.column_stack([np.cos(mids), np.sin(mids)])
    owners = scene.region_index(p + 0.5 * rho * directions)
    if np.any(owners < 0):
        raise InvalidGeometry(f"junction {junction.id}: a sector lies outside every region")

    values, methods = [], set()
    for owner, direction in zip(owners, directions):
        value, method = _sector_limit(scene.regions[owner].map, p, direction, rho)
        values.append(value)
        methods.add(method)
    limit = PiecewiseConstantCircleMap(np.asarray(values), junction.sector_angles, junction.start_angle)

    gap = float(np.max(np.hypot(*(limit.values - junction.sector_values).T)))
    if gap > 1e-6:
        logger.warning(
            f"Junction {junction.id}: limit values differ from the declared sector values by {gap:.3g}"
        )
    method = methods.pop() if len(methods) == 1 else "mixed"
    logger.debug(f"Junction {junction.id} trace at ρ={rho:.4g}: limit by {method}")
    return JunctionTrace(junction.id, float(rho), samples, limit, method)


def default_trace_radius(scene: Scene, index: int) -> float:
    """A radius safely inside the admissible range for junction `index`"""
    junction = scene.junctions[index]
    p = np.asarray(junction.point)
    incident = set(scene.incident_curves(junction))
    bound = math.inf
    samples = scene.domain.boundary_samples(4096)
    samples = samples[np.all(np.isfinite(samples), axis=1)]
    bound = min(bound, float(min_edge_distance(p[None, :], samples[:-1], samples[1:])[0]))
    for k, curve in enumerate(scene.jump_curves):
        if k not in incident:
            line = curve.alpha.polyline()
            bound = min(bound, float(min_edge_distance(p[None, :], line[:-1], line[1:])[0]))
        else:
            bound = min(bound, curve.length)
    for other in scene.junctions:
        if other is not junction:
            bound = min(bound, math.hypot(*(np.asarray(other.point) - p)))
    return 0.25 * bound


# ============================================================================
# TOTAL VARIATION
# ============================================================================

def total_variation(scene: Scene, tol: Optional[float] = None) -> float:
    """
    |Du|(Ω): ∫_{Ω∖Σ}|∇u| dx plus Σ_l ∫|u_l⁺ − u_l⁻| dt.

    Args:
        scene: a valid scene
        tol: absolute error target shared among the terms

    Returns:
        float: total variation
    """
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    n_terms = max(1, len(scene.regions) + len(scene.jump_curves))
    share = tol / n_terms

    parts = []
    for entry in scene.regions:
        if isinstance(entry.map, ConstantMap):
            continue
        region_map = entry.map
        parts.append(quadrature_2d(entry.region, lambda x, m=region_map: gradient_norm(m.gradient(x)), share))
    for curve in scene.jump_curves:
        parts.append(quadrature_1d(
            lambda t, c=curve: float(np.hypot(*c.jump(t)[0])), curve.a, curve.b, share,
            points=curve.breakpoints(),
        ))
    value = math.fsum(parts)
    logger.debug(f"Total variation of '{scene.name}': {value:.12g}")
    return value


def circular_slice_tv(region_map: PlanarMap, center, r: float, n_samples: int = 1024) -> float:
    """
    Total variation of a map restricted to ∂B_r(center), from a closed sample loop.

    Args:
        region_map: anything with a vectorized `evaluate`
        center: circle center
        r: circle radius
        n_samples: uniform samples on the circle (>= 16)

    Returns:
        float: length of the closed image polyline
    """
    if n_samples < 16:
        raise InvalidGeometry("circular slices need >= 16 samples")
    theta = np.arange(n_samples + 1) * (TWO_PI / n_samples)
    theta[-1] = 0.0
    ring = np.asarray(center, dtype=float) + r * np.column_stack([np.cos(theta), np.sin(theta)])
    return curve_tv(region_map.evaluate(ring))
