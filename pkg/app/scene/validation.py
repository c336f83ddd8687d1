"""
Network Validation

Checks that a scene's jump set is a network: curves meet only at declared
junctions, curve ends sit at junctions or on the domain boundary, junctions
have at least three sectors whose angles sum to 2π, and the regions tile the
domain. Soft findings (junction degree, near-tangential boundary hits) are
reported as warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import List, Optional

import numpy as np

from app.core.config import get_settings
from app.geometry.quadrature import patch_nodes
from app.geometry.regions import RegionSpec
from app.scene.model import Scene, point_on_boundary, sector_angles_sum_ok

logger = logging.getLogger(__name__)


@dataclass
class ValidationReport:
    passed: bool = True
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    junction_count: int = 0
    junction_sectors: List[int] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        self.violations.append(message)

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def summary(self) -> str:
        status = "pass" if self.passed else "fail"
        lines = [f"network validation: {status} ({self.junction_count} junction(s))"]
        lines += [f"  violation: {v}" for v in self.violations]
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _segment_intersections(p: np.ndarray, q: np.ndarray) -> List[np.ndarray]:
    """Intersection points of two polylines (collinear overlaps give their endpoints)"""
    hits: List[np.ndarray] = []
    for i in range(len(p) - 1):
        a, b = p[i], p[i + 1]
        d1 = b - a
        for j in range(len(q) - 1):
            c, e = q[j], q[j + 1]
            d2 = e - c
            denom = d1[0] * d2[1] - d1[1] * d2[0]
            rel = c - a
            if abs(denom) <= 1e-15 * (np.hypot(*d1) * np.hypot(*d2)):
                if abs(rel[0] * d1[1] - rel[1] * d1[0]) > 1e-12 * np.hypot(*d1):
                    continue
                # collinear: overlapping endpoints
                for point in (a, b):
                    t = float(np.dot(point - c, d2) / np.dot(d2, d2))
                    if -1e-12 <= t <= 1 + 1e-12:
                        hits.append(point)
                for point in (c, e):
                    t = float(np.dot(point - a, d1) / np.dot(d1, d1))
                    if -1e-12 <= t <= 1 + 1e-12:
                        hits.append(point)
                continue
            t = (rel[0] * d2[1] - rel[1] * d2[0]) / denom
            s = (rel[0] * d1[1] - rel[1] * d1[0]) / denom
            if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= s <= 1 + 1e-12:
                hits.append(a + t * d1)
    return hits


def _overlap_area(first: RegionSpec, second: RegionSpec) -> float:
    """Gauss estimate of |first ∩ second|, taking the larger of the two one-sided estimates"""
    estimates = []
    for inner, outer in ((first, second), (second, first)):
        pts, weights = patch_nodes(inner)
        estimates.append(float(np.dot(weights, outer.contains(pts))) if len(pts) else 0.0)
    return max(estimates)


def _near_any(point: np.ndarray, anchors: List[np.ndarray], tol: float) -> bool:
    return any(math.hypot(*(point - a)) <= tol for a in anchors)


def _boundary_tangent_angle(scene: Scene, point: np.ndarray, direction: np.ndarray) -> Optional[float]:
    """Angle between a curve direction and the domain boundary at a boundary point"""
    samples = scene.domain.boundary_samples(4096)
    samples = samples[np.all(np.isfinite(samples), axis=1)]
    seg = samples[1:] - samples[:-1]
    mid = 0.5 * (samples[1:] + samples[:-1])
    k = int(np.argmin(np.hypot(*(mid - point).T)))
    tangent = seg[k] / np.hypot(*seg[k])
    cosang = abs(float(np.dot(tangent, direction)))
    return math.acos(min(1.0, cosang))


def validate_network(scene: Scene, tol: Optional[float] = None) -> ValidationReport:
    """
    Validate the jump network of a scene.

    Args:
        scene: the scene to check
        tol: snapping tolerance for junction/boundary membership (default SNAP_TOL)

    Returns:
        ValidationReport: pass/fail with violations and warnings
    """
    settings = get_settings()
    tol = settings.SNAP_TOL if tol is None else tol
    report = ValidationReport(junction_count=len(scene.junctions))
    junction_points = [np.asarray(j.point) for j in scene.junctions]

    # junction sectors and angle sums
    for junction in scene.junctions:
        report.junction_sectors.append(junction.n_sectors)
        if junction.n_sectors < 3:
            report.fail(f"junction {junction.id}: N_i < 3 ({junction.n_sectors} sectors)")
        if np.any(junction.sector_angles <= 0):
            report.fail(f"junction {junction.id}: sector angles must be positive")
        if not sector_angles_sum_ok(junction):
            report.fail(
                f"junction {junction.id}: angle sum {float(np.sum(junction.sector_angles)):.12g} != 2π"
            )
        if not bool(scene.domain.contains([junction.point])[0]):
            report.fail(f"junction {junction.id}: point lies outside the domain")

    # curve endpoints
    for curve in scene.jump_curves:
        for label, end, s in (("start", curve.alpha.start(), 0.0), ("end", curve.alpha.end(), curve.length)):
            if _near_any(end, junction_points, tol):
                continue
            if point_on_boundary(scene.domain, end, tol):
                tangent = curve.alpha.tangent(np.array([s]))[0]
                angle = _boundary_tangent_angle(scene, end, tangent)
                if angle is not None and angle < settings.TRANSVERSALITY_MIN_ANGLE:
                    report.warn(
                        f"curve {curve.id}: {label} meets the boundary at {angle:.2e} rad (nearly tangent)"
                    )
                continue
            report.fail(
                f"curve {curve.id}: {label} point ({end[0]:.6g}, {end[1]:.6g}) is neither at a junction nor on ∂Ω"
            )

    # pairwise and self intersections
    polylines = [c.alpha.polyline() for c in scene.jump_curves]
    for i, curve in enumerate(scene.jump_curves):
        own = polylines[i]
        if len(own) > 3:
            for k in range(len(own) - 3):
                for hit in _segment_intersections(own[k:k + 2], own[k + 2:]):
                    closing = k == 0 and np.allclose(hit, own[0]) and np.allclose(own[-1], own[0])
                    if not closing:
                        report.fail(f"curve {curve.id}: not injective (self-intersection)")
                        break
        for j in range(i + 1, len(scene.jump_curves)):
            other_curve = scene.jump_curves[j]
            # curves may share an end on ∂Ω
            shared_ends = [
                e for e in (curve.alpha.start(), curve.alpha.end())
                if _near_any(e, [other_curve.alpha.start(), other_curve.alpha.end()], tol)
                and point_on_boundary(scene.domain, e, tol)
            ]
            for hit in _segment_intersections(own, polylines[j]):
                if not _near_any(hit, junction_points + shared_ends, max(tol, 1e-9)):
                    report.fail(
                        f"curves {curve.id} and {other_curve.id} intersect off-junction "
                        f"at ({hit[0]:.6g}, {hit[1]:.6g})"
                    )
                    break

    # junction degree
    for junction in scene.junctions:
        degree = len(scene.incident_curves(junction, tol))
        if degree != junction.n_sectors:
            report.warn(
                f"junction {junction.id}: {degree} incident curve end(s) for {junction.n_sectors} sectors"
            )

    # coverage by area
    covered = math.fsum(entry.region.area for entry in scene.regions)
    domain_area = scene.domain.area
    if abs(covered - domain_area) > 1e-6 * max(1.0, domain_area):
        report.fail(f"regions cover area {covered:.9g} but the domain has area {domain_area:.9g}")

    # pairwise disjointness; interior Gauss nodes never sit on a shared edge
    for i, entry in enumerate(scene.regions):
        for other in scene.regions[i + 1:]:
            overlap = _overlap_area(entry.region, other.region)
            if overlap > 1e-6 * max(1.0, domain_area):
                report.fail(f"regions {entry.id} and {other.id} overlap (area about {overlap:.3g})")

    if report.passed:
        logger.info(f"Scene '{scene.name}' passed network validation ({report.junction_count} junctions)")
    else:
        logger.warning(f"Scene '{scene.name}' failed network validation: {len(report.violations)} violation(s)")
    return report
