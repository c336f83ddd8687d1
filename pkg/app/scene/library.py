"""
Scene Library

Programmatic builders for the named configurations: homogeneous n-uple
points (triple point, double butterfly, the five-point loop), the straight
jump on a rectangle, and finite truncations of the infinite triple point.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import InvalidGeometry, InvalidScene
from app.geometry.maps import ConstantMap, PlanarMap
from app.geometry.primitives import TWO_PI, PiecewiseConstantCircleMap, as_points
from app.geometry.regions import (
    AnnularSectorRegion,
    CircularSegmentRegion,
    DiskRegion,
    PolygonRegion,
    UnionRegion,
)
from app.scene.curves import JumpCurve, PolylineCurve
from app.scene.model import Junction, RegionEntry, Scene

logger = logging.getLogger(__name__)

TRIANGLE_VALUES = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


# ============================================================================
# CIRCLE DATA
# ============================================================================

def double_butterfly_values() -> np.ndarray:
    """Twelve values running T₁₂₃ and T₁₄₅ twice each, with opposite orientations"""
    a1, a2, a3, a4, a5 = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-2.0, 0.0), (0.0, -2.0)
    return np.array([a1, a2, a3, a1, a4, a5, a1, a3, a2, a1, a5, a4], dtype=float)


def five_point_values() -> np.ndarray:
    """Self-intersecting pentagon whose inner quadrilateral is wound twice"""
    return np.array([(0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (2.0, -1.0), (1.0, 3.0)], dtype=float)


def merge_repeated_values(gamma: PiecewiseConstantCircleMap) -> PiecewiseConstantCircleMap:
    """Fuse consecutive arcs (cyclically) that carry the same value"""
    values = [np.asarray(v) for v in gamma.values]
    arcs = [float(a) for a in gamma.arc_angles]
    start = gamma.start_angle
    i = 0
    while len(values) > 1 and i < len(values):
        j = (i + 1) % len(values)
        if np.array_equal(values[i], values[j]):
            if j == 0:
                # wrap: the last arc absorbs the first
                start -= arcs[0]
                arcs[i] += arcs[0]
                del values[0], arcs[0]
                i -= 1
            else:
                arcs[i] += arcs[j]
                del values[j], arcs[j]
            continue
        i += 1
    arcs[-1] = TWO_PI - math.fsum(arcs[:-1])
    return PiecewiseConstantCircleMap(np.asarray(values), np.asarray(arcs), start)


# ============================================================================
# N-UPLE POINTS
# ============================================================================

def _direction(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def n_uple_scene(gamma: PiecewiseConstantCircleMap, r: float = 1.0,
                 center: Sequence[float] = (0.0, 0.0), name: Optional[str] = None) -> Scene:
    """
    Homogeneous map u(x) = γ((x − c)/|x − c|) on B_r(c).

    Args:
        gamma: piecewise constant circle data
        r: disk radius
        center: disk center
        name: scene name

    Returns:
        Scene: one sector region per value, radii as jump curves, one
        junction at the center when three or more values remain after merging
    """
    if r <= 0:
        raise InvalidGeometry("radius must be positive")
    gamma = merge_repeated_values(gamma)
    c = np.asarray(center, dtype=float)
    domain = DiskRegion(tuple(c), r)
    name = name or f"{gamma.n_values}-uple point"

    if gamma.n_values == 1:
        entry = RegionEntry("r0", domain, ConstantMap(gamma.values[0]))
        return Scene(domain, (entry,), name=name, metadata={"kind": "n-uple", "r": r})

    bounds = gamma.breakpoints()
    regions = []
    for k, (value, arc) in enumerate(zip(gamma.values, gamma.arc_angles)):
        sector = AnnularSectorRegion(tuple(c), r, float(bounds[k]), float(bounds[k] + arc))
        regions.append(RegionEntry(f"r{k}", sector, ConstantMap(value)))

    if gamma.n_values == 2:
        path = [c + r * _direction(bounds[0]), c, c + r * _direction(bounds[1])]
        curves = [JumpCurve("c0", PolylineCurve(np.asarray(path)))]
        return Scene(domain, tuple(regions), tuple(curves), name=name, metadata={"kind": "n-uple", "r": r})

    curves = [
        JumpCurve(f"c{k}", PolylineCurve(np.vstack([c, c + r * _direction(b)])))
        for k, b in enumerate(bounds)
    ]
    junction = Junction("p0", tuple(c), gamma.values, gamma.arc_angles, gamma.start_angle)
    return Scene(domain, tuple(regions), tuple(curves), (junction,), name=name,
                 metadata={"kind": "n-uple", "r": r})


def n_uple_circle_data(scene: Scene) -> Tuple[PiecewiseConstantCircleMap, float, Tuple[float, float]]:
    """
    Recover (γ, r, center) from a homogeneous n-uple scene, loaded or built.

    Raises:
        InvalidScene: a region is not a constant-valued disk sector around the domain center
    """
    domain = scene.domain
    full_turn = isinstance(domain, AnnularSectorRegion) and domain.theta1 - domain.theta0 >= TWO_PI - 1e-12
    if not full_turn or domain.r_in != 0.0:
        raise InvalidScene(f"scene '{scene.name}' is not posed on a disk")
    sectors = []
    for entry in scene.regions:
        region = entry.region
        if not isinstance(region, AnnularSectorRegion) or not isinstance(entry.map, ConstantMap):
            raise InvalidScene(f"region {entry.id} is not a constant-valued sector")
        concentric = np.allclose(region.center, domain.center) and abs(region.r_out - domain.r_out) <= 1e-12
        if region.r_in != 0.0 or not concentric:
            raise InvalidScene(f"region {entry.id} is not a full-radius sector of the domain")
        sectors.append((region.theta0 % TWO_PI, region.theta1 - region.theta0, entry.map.value))
    sectors.sort(key=lambda s: s[0])
    gamma = PiecewiseConstantCircleMap(np.array([s[2] for s in sectors]), np.array([s[1] for s in sectors]),
                                       sectors[0][0])
    return gamma, float(domain.r_out), domain.center


def triple_point_scene(values: Sequence = TRIANGLE_VALUES, r: float = 1.0) -> Scene:
    """Three values on 120° sectors of B_r"""
    return n_uple_scene(PiecewiseConstantCircleMap.uniform(as_points(values)), r, name="triple point")


def double_butterfly_scene(r: float = 1.0) -> Scene:
    return n_uple_scene(PiecewiseConstantCircleMap.uniform(double_butterfly_values()), r,
                        name="double butterfly")


def five_point_scene(r: float = 1.0) -> Scene:
    return n_uple_scene(PiecewiseConstantCircleMap.uniform(five_point_values()), r, name="five point")


# ============================================================================
# STRAIGHT JUMP
# ============================================================================

MapLike = Union[PlanarMap, Sequence[float]]


def _as_map(value: MapLike) -> PlanarMap:
    if hasattr(value, "evaluate") and hasattr(value, "gradient"):
        return value
    return ConstantMap(np.asarray(value, dtype=float))


def straight_jump_scene(a: float = 0.0, b: float = 1.0, upper: MapLike = (1.0, 0.0),
                        lower: MapLike = (0.0, 0.0)) -> Scene:
    """
    R = [a, b] × [−1, 1] with the jump along [a, b] × {0}.

    The curve runs in +x, so the plus trace comes from the upper half R⁺.
    """
    if b <= a:
        raise InvalidGeometry("straight jump needs a < b")
    domain = PolygonRegion(np.array([[a, -1.0], [b, -1.0], [b, 1.0], [a, 1.0]]))
    upper_half = PolygonRegion(np.array([[a, 0.0], [b, 0.0], [b, 1.0], [a, 1.0]]))
    lower_half = PolygonRegion(np.array([[a, -1.0], [b, -1.0], [b, 0.0], [a, 0.0]]))
    regions = (
        RegionEntry("upper", upper_half, _as_map(upper)),
        RegionEntry("lower", lower_half, _as_map(lower)),
    )
    curve = JumpCurve("jump", PolylineCurve(np.array([[a, 0.0], [b, 0.0]])), a=a)
    return Scene(domain, regions, (curve,), name="straight jump",
                 metadata={"kind": "straight-jump", "a": a, "b": b})


# ============================================================================
# INFINITE TRIPLE POINT
# ============================================================================

def _cut_points(levels: int) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    a0 = np.array([math.sqrt(3.0) / 2.0, 0.5])
    b0 = np.array([math.sqrt(3.0) / 2.0, -0.5])
    scales = [2.0 ** -i for i in range(levels + 2)]
    return [s * a0 for s in scales], [s * b0 for s in scales]


def infinite_triple_scene(alpha: Sequence[float] = (0.0, 0.0), beta: Sequence[float] = (1.0, 0.0),
                          gamma: Sequence[float] = (0.0, 1.0), levels: int = 20) -> Scene:
    """
    Level-N truncation of the map with infinitely many triple points.

    The triangle with vertices O, A₀, B₀ (A₀, B₀ on ∂B₁) is cut by the
    vertical segments A_iB_i, A_i = 2^{-i}A₀, into trapezoids carrying β and γ
    alternately from the outside in; α fills the rest of the unit disk. The
    truncation stops after cut N+1 and fills the innermost triangle with the
    next alternating value. Every A_i, B_i with i >= 1 is a triple junction.

    Args:
        alpha, beta, gamma: the three values
        levels: truncation level N >= 1

    Returns:
        Scene: the truncated scene on B₁
    """
    if levels < 1:
        raise InvalidGeometry("levels must be >= 1")
    alpha_v, beta_v, gamma_v = (np.asarray(v, dtype=float) for v in (alpha, beta, gamma))
    tops, bottoms = _cut_points(levels)
    inner_count = levels + 1  # trapezoids 0..N, then the innermost triangle

    def value_of(k: int) -> np.ndarray:
        return beta_v if k % 2 == 0 else gamma_v

    sixth = math.pi / 6.0
    domain = DiskRegion((0.0, 0.0), 1.0)
    outside = UnionRegion((
        AnnularSectorRegion((0.0, 0.0), 1.0, sixth, 11.0 * sixth),
        CircularSegmentRegion((0.0, 0.0), 1.0, -sixth, sixth),
    ))
    regions = [RegionEntry("alpha", outside, ConstantMap(alpha_v))]
    for k in range(inner_count):
        quad = np.array([bottoms[k], tops[k], tops[k + 1], bottoms[k + 1]])
        regions.append(RegionEntry(f"t{k}", PolygonRegion(quad), ConstantMap(value_of(k))))
    innermost = np.array([[0.0, 0.0], bottoms[inner_count], tops[inner_count]])
    regions.append(RegionEntry("core", PolygonRegion(innermost), ConstantMap(value_of(inner_count))))

    curves = [JumpCurve(f"cut{i}", PolylineCurve(np.array([tops[i], bottoms[i]])))
              for i in range(inner_count + 1)]
    for k in range(inner_count):
        curves.append(JumpCurve(f"upper{k}", PolylineCurve(np.array([tops[k + 1], tops[k]]))))
        curves.append(JumpCurve(f"lower{k}", PolylineCurve(np.array([bottoms[k], bottoms[k + 1]]))))
    curves.append(JumpCurve("apex", PolylineCurve(np.array([tops[inner_count], [0.0, 0.0], bottoms[inner_count]]))))

    third = math.pi / 3.0
    junctions = []
    for i in range(1, inner_count + 1):
        inner, outer = value_of(i), value_of(i - 1)
        junctions.append(Junction(f"A{i}", tuple(tops[i]), np.array([alpha_v, inner, outer]),
                                  np.array([math.pi, third, 2.0 * third]), sixth))
        junctions.append(Junction(f"B{i}", tuple(bottoms[i]), np.array([outer, inner, alpha_v]),
                                  np.array([2.0 * third, third, math.pi]), 11.0 * sixth))

    logger.info(f"Built infinite triple point truncation at level {levels}: "
                f"{len(regions)} regions, {len(curves)} curves, {len(junctions)} junctions")
    return Scene(domain, tuple(regions), tuple(curves), tuple(junctions),
                 name=f"infinite triple point (N={levels})",
                 metadata={"kind": "infinite-triple", "levels": levels})


def infinite_triple_limit_tv(alpha, beta, gamma) -> float:
    """7/3|β − α| + 2/3|α − γ| + |β − γ|"""
    a, b, c = (np.asarray(v, dtype=float) for v in (alpha, beta, gamma))
    return (7.0 / 3.0) * float(np.hypot(*(b - a))) + (2.0 / 3.0) * float(np.hypot(*(a - c))) \
        + float(np.hypot(*(b - c)))
