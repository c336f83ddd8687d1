"""
Regions and Quadrature Patches

Source-plane regions (simple polygons, disks, annular sectors, circular
segments, polar-parameter triangles and unions of these) and the unit-square
patches the adaptive quadrature integrates over.

A patch is a smooth map (u, v) ∈ [0,1]² → ℝ² together with its Jacobian
factor, so integrals over curved regions reduce to integrals over squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from matplotlib.path import Path

from app.core.exceptions import InvalidGeometry
from app.geometry.primitives import TWO_PI, as_points
from app.geometry.winding import min_edge_distance


# ============================================================================
# PATCHES
# ============================================================================

class Patch:
    """Smooth parametrization of a piece of a region by the unit square"""

    def map(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Points (m, 2) and nonnegative area factors (m,) at unit-square nodes"""
        raise NotImplementedError


@dataclass(frozen=True)
class RectanglePatch(Patch):
    x0: float
    y0: float
    x1: float
    y1: float

    def map(self, u, v):
        pts = np.column_stack([self.x0 + u * (self.x1 - self.x0), self.y0 + v * (self.y1 - self.y0)])
        return pts, np.full(len(u), abs((self.x1 - self.x0) * (self.y1 - self.y0)))


@dataclass(frozen=True)
class TrianglePatch(Patch):
    """Duffy collapse of the square onto triangle (a, b, c); singular side at a"""
    a: Tuple[float, float]
    b: Tuple[float, float]
    c: Tuple[float, float]

    def map(self, u, v):
        a, b, c = (np.asarray(p, dtype=float) for p in (self.a, self.b, self.c))
        e1, e2 = b - a, c - b
        pts = a + u[:, None] * (e1 + v[:, None] * e2)
        det = abs(e1[0] * e2[1] - e1[1] * e2[0])
        return pts, u * det


@dataclass(frozen=True)
class PolarPatch(Patch):
    """
    {c + ρ(cos θ, sin θ): θ0 <= θ <= θ1, ρ_in(θ) <= ρ <= ρ_out(θ)}

    Radius bounds are vectorized callables of θ; constants are allowed.
    """
    center: Tuple[float, float]
    theta0: float
    theta1: float
    rho_in: Callable[[np.ndarray], np.ndarray]
    rho_out: Callable[[np.ndarray], np.ndarray]

    def map(self, u, v):
        theta = self.theta0 + u * (self.theta1 - self.theta0)
        lo = np.broadcast_to(self.rho_in(theta), theta.shape)
        hi = np.broadcast_to(self.rho_out(theta), theta.shape)
        rho = lo + v * (hi - lo)
        pts = np.column_stack([self.center[0] + rho * np.cos(theta), self.center[1] + rho * np.sin(theta)])
        return pts, rho * (hi - lo) * (self.theta1 - self.theta0)


@dataclass(frozen=True)
class PolarTrianglePatch(Patch):
    """
    Triangle in polar parameter space (ρ, θ) pushed to the plane by
    x = c + scale·ρ(cos θ, sin θ). Vertex `a` may sit at ρ = 0.
    """
    center: Tuple[float, float]
    scale: float
    a: Tuple[float, float]
    b: Tuple[float, float]
    c: Tuple[float, float]

    def map(self, u, v):
        a, b, c = (np.asarray(p, dtype=float) for p in (self.a, self.b, self.c))
        e1, e2 = b - a, c - b
        param = a + u[:, None] * (e1 + v[:, None] * e2)
        det = abs(e1[0] * e2[1] - e1[1] * e2[0])
        rho, theta = param[:, 0], param[:, 1]
        pts = np.column_stack([
            self.center[0] + self.scale * rho * np.cos(theta),
            self.center[1] + self.scale * rho * np.sin(theta),
        ])
        return pts, u * det * self.scale ** 2 * np.abs(rho)


def _constant(value: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda theta: np.full(np.shape(theta), value)


# ============================================================================
# REGIONS
# ============================================================================

class RegionSpec:
    """A closed source-plane region with area, containment and patches"""

    kind: str = "region"

    @property
    def area(self) -> float:
        raise NotImplementedError

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def patches(self) -> List[Patch]:
        raise NotImplementedError

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        """Closed boundary polyline, for plotting"""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def ear_clip(vertices: np.ndarray) -> List[Tuple[int, int, int]]:
    """Triangulate a simple CCW polygon by ear clipping"""
    idx = list(range(len(vertices)))
    tris: List[Tuple[int, int, int]] = []

    def cross(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * len(vertices) ** 2:
            raise InvalidGeometry("polygon could not be triangulated (not simple?)")
        found = False
        for k in range(len(idx)):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            p0, p1, p2 = vertices[i0], vertices[i1], vertices[i2]
            if cross(p0, p1, p2) <= 0:
                continue
            inside = False
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                q = vertices[j]
                if cross(p0, p1, q) >= 0 and cross(p1, p2, q) >= 0 and cross(p2, p0, q) >= 0:
                    inside = True
                    break
            if inside:
                continue
            tris.append((i0, i1, i2))
            del idx[k]
            found = True
            break
        if not found:
            raise InvalidGeometry("polygon could not be triangulated (not simple?)")
    tris.append((idx[0], idx[1], idx[2]))
    return tris


@dataclass(frozen=True)
class PolygonRegion(RegionSpec):
    """Simple polygon; stored counterclockwise"""
    vertices: np.ndarray = field(repr=False)

    kind = "polygon"

    def __post_init__(self):
        verts = as_points(self.vertices)
        if len(verts) < 3:
            raise InvalidGeometry("a polygon region needs >= 3 vertices")
        x, y = verts.T
        signed = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
        if abs(signed) <= 0.0:
            raise InvalidGeometry("polygon region has zero area")
        if signed < 0:
            verts = verts[::-1].copy()
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @property
    def area(self) -> float:
        x, y = self.vertices.T
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def contains(self, points) -> np.ndarray:
        pts = as_points(points)
        closed = np.roll(self.vertices, -1, axis=0)
        on_edge = min_edge_distance(pts, self.vertices, closed) <= 1e-12
        return Path(self.vertices).contains_points(pts) | on_edge

    def patches(self) -> List[Patch]:
        out: List[Patch] = []
        for i0, i1, i2 in ear_clip(self.vertices):
            a, b, c = self.vertices[i0], self.vertices[i1], self.vertices[i2]
            out.append(TrianglePatch(tuple(a), tuple(b), tuple(c)))
        return out

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        return np.vstack([self.vertices, self.vertices[:1]])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class AnnularSectorRegion(RegionSpec):
    """{c + ρ(cos θ, sin θ): r_in <= ρ <= r_out, θ0 <= θ <= θ1}; r_in = 0 gives a disk sector"""
    center: Tuple[float, float]
    r_out: float
    theta0: float
    theta1: float
    r_in: float = 0.0

    kind = "sector"

    def __post_init__(self):
        if not (0.0 <= self.r_in < self.r_out):
            raise InvalidGeometry("sector radii must satisfy 0 <= r_in < r_out")
        span = self.theta1 - self.theta0
        if not (0.0 < span <= TWO_PI + 1e-12):
            raise InvalidGeometry("sector angles must satisfy 0 < θ1 − θ0 <= 2π")

    @property
    def area(self) -> float:
        return 0.5 * (self.theta1 - self.theta0) * (self.r_out ** 2 - self.r_in ** 2)

    def contains(self, points) -> np.ndarray:
        pts = as_points(points) - np.asarray(self.center)
        rho = np.hypot(pts[:, 0], pts[:, 1])
        rel = np.mod(np.arctan2(pts[:, 1], pts[:, 0]) - self.theta0, TWO_PI)
        in_angle = (rel <= self.theta1 - self.theta0 + 1e-12) | (rel >= TWO_PI - 1e-12) | (rho <= 1e-15)
        return in_angle & (rho >= self.r_in - 1e-12) & (rho <= self.r_out + 1e-12)

    def patches(self) -> List[Patch]:
        return [PolarPatch(tuple(self.center), self.theta0, self.theta1,
                           _constant(self.r_in), _constant(self.r_out))]

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        t = np.linspace(self.theta0, self.theta1, max(n, 8))
        c = np.asarray(self.center)
        outer = c + self.r_out * np.column_stack([np.cos(t), np.sin(t)])
        inner = c + self.r_in * np.column_stack([np.cos(t[::-1]), np.sin(t[::-1])])
        return np.vstack([outer, inner, outer[:1]])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "center": list(self.center), "r_in": self.r_in, "r_out": self.r_out,
                "theta0": self.theta0, "theta1": self.theta1}


class DiskRegion(AnnularSectorRegion):
    """Closed disk B_r(c)"""

    kind = "disk"

    def __init__(self, center: Sequence[float], radius: float):
        super().__init__(center=(float(center[0]), float(center[1])), r_out=float(radius),
                         theta0=0.0, theta1=TWO_PI, r_in=0.0)

    @property
    def radius(self) -> float:
        return self.r_out

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        t = np.linspace(0.0, TWO_PI, max(n, 8))
        t[-1] = 0.0
        return np.asarray(self.center) + self.r_out * np.column_stack([np.cos(t), np.sin(t)])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "center": list(self.center), "radius": self.r_out}


@dataclass(frozen=True)
class CircularSegmentRegion(RegionSpec):
    """Part of B_r(c) cut off by the chord between the boundary points at θ0 and θ1 (θ0 < θ1 < θ0 + π)"""
    center: Tuple[float, float]
    radius: float
    theta0: float
    theta1: float

    kind = "segment"

    def __post_init__(self):
        span = self.theta1 - self.theta0
        if not (0.0 < span < math.pi):
            raise InvalidGeometry("circular segment needs 0 < θ1 − θ0 < π")

    @property
    def _half(self) -> float:
        return 0.5 * (self.theta1 - self.theta0)

    def _chord_radius(self, theta):
        mid = 0.5 * (self.theta0 + self.theta1)
        return self.radius * math.cos(self._half) / np.cos(theta - mid)

    @property
    def area(self) -> float:
        span = self.theta1 - self.theta0
        return 0.5 * self.radius ** 2 * (span - math.sin(span))

    def contains(self, points) -> np.ndarray:
        pts = as_points(points) - np.asarray(self.center)
        mid = 0.5 * (self.theta0 + self.theta1)
        axis = np.array([math.cos(mid), math.sin(mid)])
        along = pts @ axis
        rho = np.hypot(pts[:, 0], pts[:, 1])
        return (along >= self.radius * math.cos(self._half) - 1e-12) & (rho <= self.radius + 1e-12)

    def patches(self) -> List[Patch]:
        return [PolarPatch(tuple(self.center), self.theta0, self.theta1,
                           self._chord_radius, _constant(self.radius))]

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        t = np.linspace(self.theta0, self.theta1, max(n, 8))
        arc = np.asarray(self.center) + self.radius * np.column_stack([np.cos(t), np.sin(t)])
        return np.vstack([arc, arc[:1]])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "center": list(self.center), "radius": self.radius,
                "theta0": self.theta0, "theta1": self.theta1}


@dataclass(frozen=True)
class PolarTriangleRegion(RegionSpec):
    """Image of a (ρ, θ) parameter triangle under x = c + scale·ρ(cos θ, sin θ)"""
    center: Tuple[float, float]
    scale: float
    a: Tuple[float, float]
    b: Tuple[float, float]
    c: Tuple[float, float]

    kind = "polar_triangle"

    @property
    def area(self) -> float:
        # ∫ scale² ρ over the parameter triangle = scale² · |T| · mean ρ of vertices
        e1 = np.subtract(self.b, self.a)
        e2 = np.subtract(self.c, self.a)
        tri = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
        return self.scale ** 2 * tri * (self.a[0] + self.b[0] + self.c[0]) / 3.0

    def contains(self, points) -> np.ndarray:
        pts = as_points(points) - np.asarray(self.center)
        rho = np.hypot(pts[:, 0], pts[:, 1]) / self.scale
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        corners = np.array([self.a, self.b, self.c], dtype=float)
        lo = corners[:, 1].min()
        param = np.column_stack([rho, lo + np.mod(theta - lo, TWO_PI)])
        on_edge = min_edge_distance(param, corners, np.roll(corners, -1, axis=0)) <= 1e-12
        return Path(corners).contains_points(param) | on_edge

    def patches(self) -> List[Patch]:
        return [PolarTrianglePatch(tuple(self.center), self.scale, tuple(self.a), tuple(self.b), tuple(self.c))]

    def boundary_samples(self, n: int = 64) -> np.ndarray:
        corners = np.array([self.a, self.b, self.c, self.a])
        params = np.vstack([np.linspace(corners[i], corners[i + 1], n) for i in range(3)])
        return np.asarray(self.center) + self.scale * params[:, :1] * np.column_stack(
            [np.cos(params[:, 1]), np.sin(params[:, 1])])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "center": list(self.center), "scale": self.scale,
                "a": list(self.a), "b": list(self.b), "c": list(self.c)}


@dataclass(frozen=True)
class UnionRegion(RegionSpec):
    """Union of regions with disjoint interiors"""
    parts: Tuple[RegionSpec, ...]

    kind = "union"

    def __post_init__(self):
        if not self.parts:
            raise InvalidGeometry("a union region needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def area(self) -> float:
        return math.fsum(p.area for p in self.parts)

    def contains(self, points) -> np.ndarray:
        pts = as_points(points)
        mask = np.zeros(len(pts), dtype=bool)
        for part in self.parts:
            mask |= part.contains(pts)
        return mask

    def patches(self) -> List[Patch]:
        return [patch for part in self.parts for patch in part.patches()]

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        pieces = [part.boundary_samples(n) for part in self.parts]
        gap = np.full((1, 2), np.nan)
        out = []
        for piece in pieces:
            out.extend([piece, gap])
        return np.vstack(out[:-1])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "parts": [p.to_dict() for p in self.parts]}


def region_from_dict(data: dict) -> RegionSpec:
    """Build a RegionSpec from its JSON form"""
    kind = data.get("kind")
    if kind == "polygon":
        return PolygonRegion(np.asarray(data["vertices"], dtype=float))
    if kind == "disk":
        return DiskRegion(tuple(data["center"]), float(data["radius"]))
    if kind == "sector":
        return AnnularSectorRegion(tuple(data["center"]), float(data["r_out"]), float(data["theta0"]),
                                   float(data["theta1"]), float(data.get("r_in", 0.0)))
    if kind == "segment":
        return CircularSegmentRegion(tuple(data["center"]), float(data["radius"]),
                                     float(data["theta0"]), float(data["theta1"]))
    if kind == "polar_triangle":
        return PolarTriangleRegion(tuple(data["center"]), float(data["scale"]), tuple(data["a"]),
                                   tuple(data["b"]), tuple(data["c"]))
    if kind == "union":
        return UnionRegion(tuple(region_from_dict(p) for p in data["parts"]))
    raise InvalidGeometry(f"unknown region kind {kind!r}")
