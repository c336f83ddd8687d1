"""
Scene Model

A piecewise Lipschitz map: a domain, a partition into regions each carrying a
planar map, the jump network of arc-length curves, and the junction points.
Scenes are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import InvalidGeometry
from app.geometry.maps import PlanarMap
from app.geometry.primitives import TWO_PI, PiecewiseConstantCircleMap, as_points
from app.geometry.regions import DiskRegion, PolygonRegion, RegionSpec
from app.geometry.winding import min_edge_distance
from app.scene.curves import JumpCurve, MapTrace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegionEntry:
    """Ω_k together with u restricted to it"""
    id: str
    region: RegionSpec
    map: PlanarMap


@dataclass(frozen=True)
class Junction:
    """
    Junction point p_i with sector values listed counterclockwise.

    Sector k spans [start_angle + θ_1 + ... + θ_{k-1}, start_angle + θ_1 + ... + θ_k].
    Counts and angle sums are not enforced here; validate_network reports them.
    """
    id: str
    point: Tuple[float, float]
    sector_values: np.ndarray = field(repr=False)
    sector_angles: np.ndarray = field(repr=False)
    start_angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "point", (float(self.point[0]), float(self.point[1])))
        object.__setattr__(self, "sector_values", as_points(self.sector_values))
        object.__setattr__(self, "sector_angles", np.asarray(self.sector_angles, dtype=float).ravel())
        if len(self.sector_values) != len(self.sector_angles):
            raise InvalidGeometry(f"junction {self.id}: values and angles differ in length")

    @property
    def n_sectors(self) -> int:
        return len(self.sector_values)

    def sector_bounds(self) -> np.ndarray:
        """(N, 2) start and end angle of each sector"""
        cum = np.concatenate([[0.0], np.cumsum(self.sector_angles)])
        return self.start_angle + np.column_stack([cum[:-1], cum[1:]])

    def sector_midangles(self) -> np.ndarray:
        return self.sector_bounds().mean(axis=1)

    def circle_data(self, values: Optional[np.ndarray] = None) -> PiecewiseConstantCircleMap:
        """γ^i as piecewise constant circle data (declared or supplied values)"""
        vals = self.sector_values if values is None else as_points(values)
        return PiecewiseConstantCircleMap(vals, self.sector_angles, self.start_angle)


@dataclass(frozen=True)
class Scene:
    """PiecewiseMapScene: domain, regions, jump curves, junctions"""
    domain: RegionSpec
    regions: Tuple[RegionEntry, ...]
    jump_curves: Tuple[JumpCurve, ...] = ()
    junctions: Tuple[Junction, ...] = ()
    name: str = "scene"
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "jump_curves", tuple(self._resolve_traces(c) for c in self.jump_curves))
        object.__setattr__(self, "junctions", tuple(self.junctions))

    # ------------------------------------------------------------------
    # lookup
    # ------------------------------------------------------------------

    def region_index(self, points) -> np.ndarray:
        """Index of the first region containing each point, -1 if none"""
        pts = as_points(points)
        out = np.full(len(pts), -1, dtype=int)
        for k, entry in enumerate(self.regions):
            free = out < 0
            if not np.any(free):
                break
            hit = np.zeros(len(pts), dtype=bool)
            hit[free] = entry.region.contains(pts[free])
            out[hit] = k
        return out

    def evaluate(self, points) -> np.ndarray:
        """u at arbitrary domain points (region lookup; NaN outside every region)"""
        pts = as_points(points)
        idx = self.region_index(pts)
        out = np.full((len(pts), 2), np.nan)
        for k in np.unique(idx[idx >= 0]):
            mask = idx == k
            out[mask] = self.regions[k].map.evaluate(pts[mask])
        return out

    def gradient(self, points) -> np.ndarray:
        pts = as_points(points)
        idx = self.region_index(pts)
        out = np.full((len(pts), 2, 2), np.nan)
        for k in np.unique(idx[idx >= 0]):
            mask = idx == k
            out[mask] = self.regions[k].map.gradient(pts[mask])
        return out

    def incident_curves(self, junction: Junction, tol: Optional[float] = None) -> List[int]:
        """Indices of curves with an endpoint at the junction point"""
        tol = get_settings().SNAP_TOL if tol is None else tol
        p = np.asarray(junction.point)
        out = []
        for k, curve in enumerate(self.jump_curves):
            ends = (curve.alpha.start(), curve.alpha.end())
            if any(math.hypot(*(e - p)) <= tol for e in ends):
                out.append(k)
        return out

    @property
    def curve_ids(self) -> List[str]:
        return [c.id for c in self.jump_curves]

    @property
    def junction_ids(self) -> List[str]:
        return [j.id for j in self.junctions]

    # ------------------------------------------------------------------
    # traces
    # ------------------------------------------------------------------

    def _region_beside(self, curve: JumpCurve, side: float) -> int:
        """Region on one side of the curve, sampled at a few interior parameters"""
        offset = min(1e-7 * max(1.0, curve.length), 1e-3 * curve.length)
        kinks = np.asarray(curve.alpha.breakpoints())
        for frac in (0.5, 0.3, 0.7, 0.1, 0.9):
            s = np.array([frac * curve.length])
            if kinks.size and np.min(np.abs(kinks - s[0])) < 10.0 * offset:
                continue
            point = curve.alpha.position(s) + side * offset * curve.alpha.normal(s)
            idx = int(self.region_index(point)[0])
            if idx >= 0:
                return idx
        raise InvalidGeometry(f"curve {curve.id}: no region found on the {'left' if side > 0 else 'right'} side")

    def _resolve_traces(self, curve: JumpCurve) -> JumpCurve:
        if curve.has_traces:
            return curve
        plus = self.regions[self._region_beside(curve, +1.0)]
        minus = self.regions[self._region_beside(curve, -1.0)]
        logger.debug(f"Curve {curve.id}: plus side {plus.id}, minus side {minus.id}")
        return curve.with_traces(MapTrace(minus.map, curve.alpha, -1.0), MapTrace(plus.map, curve.alpha, +1.0))

    def sides_of(self, curve: JumpCurve) -> Tuple[str, str]:
        """(minus region id, plus region id)"""
        return (self.regions[self._region_beside(curve, -1.0)].id,
                self.regions[self._region_beside(curve, +1.0)].id)


def sector_angles_sum_ok(junction: Junction, tol: Optional[float] = None) -> bool:
    tol = get_settings().ANGLE_SUM_TOL if tol is None else tol
    return abs(float(np.sum(junction.sector_angles)) - TWO_PI) <= tol


def point_on_boundary(domain: RegionSpec, point: Sequence[float], tol: float = 1e-9) -> bool:
    """Whether a point lies on ∂Ω (within tol); curved non-disk boundaries are polygonized"""
    if isinstance(domain, DiskRegion):
        return abs(math.hypot(point[0] - domain.center[0], point[1] - domain.center[1]) - domain.radius) <= tol
    samples = domain.boundary_samples(4096)
    samples = samples[np.all(np.isfinite(samples), axis=1)]
    dist = float(min_edge_distance(np.asarray([point], dtype=float), samples[:-1], samples[1:])[0])
    return dist <= (tol if isinstance(domain, PolygonRegion) else max(tol, 1e-6))
