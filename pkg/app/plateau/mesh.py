"""
Disk Meshes and Discrete Maps

Polar-ring triangulations of the unit disk and piecewise affine competitors
on them. A DiscreteMap is read two ways:

- on the Euclidean triangles, where it is affine and its Jacobian mass
  Σ_T |T|·|det ∇v_T| is the signed image area summed in absolute value;
- in polar parameter space (ρ, θ), where it is piecewise affine in (ρ, θ)
  (bilinear cone cells around the center). This reading covers the whole
  disk exactly and is what recovery maps rescale into small balls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import DegenerateTriangle, InvalidGeometry
from app.geometry.primitives import TWO_PI, SampledCircleMap, as_points
from app.geometry.regions import AnnularSectorRegion, PolarTriangleRegion, RegionSpec

logger = logging.getLogger(__name__)


# ============================================================================
# BOUNDARY DATA
# ============================================================================

@dataclass(frozen=True)
class BoundaryData:
    """
    Boundary values at angular nodes of ∂B₁, linear in angle in between.

    Angles are strictly increasing and span less than one turn.
    """
    angles: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).ravel()
        values = as_points(self.values)
        if len(angles) != len(values) or len(angles) < 3:
            raise InvalidGeometry("boundary data needs >= 3 nodes with one value each")
        if np.any(np.diff(angles) <= 0.0) or angles[-1] - angles[0] >= TWO_PI:
            raise InvalidGeometry("boundary node angles must be strictly increasing within one turn")
        angles.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_circle_map(cls, circle_map: SampledCircleMap) -> "BoundaryData":
        return cls(circle_map.angles, circle_map.values)

    @property
    def n_nodes(self) -> int:
        return len(self.angles)

    def gaps(self) -> np.ndarray:
        return np.diff(np.append(self.angles, self.angles[0] + TWO_PI))

    def evaluate(self, theta) -> np.ndarray:
        theta = self.angles[0] + np.mod(np.asarray(theta, dtype=float) - self.angles[0], TWO_PI)
        ext = np.append(self.angles, self.angles[0] + TWO_PI)
        vals = np.vstack([self.values, self.values[:1]])
        return np.column_stack([np.interp(theta, ext, vals[:, 0]), np.interp(theta, ext, vals[:, 1])])

    def refined(self, max_gap: float) -> "BoundaryData":
        """Insert nodes so that no angular gap exceeds max_gap; values are unchanged as a function"""
        pieces = []
        for theta, gap in zip(self.angles, self.gaps()):
            parts = max(1, int(math.ceil(gap / max_gap - 1e-12)))
            pieces.append(theta + gap * np.arange(parts) / parts)
        angles = np.concatenate(pieces)
        return BoundaryData(angles, self.evaluate(angles))


# ============================================================================
# MESH
# ============================================================================

@dataclass(frozen=True)
class DiskMesh:
    """
    Polar-ring triangulation of B₁.

    Vertex 0 is the center; ring j (0-based, radius `ring_radii[j]`) holds
    one vertex per angular node at index 1 + j·n + i. The last ring is ∂B₁.
    Every ring uses the same sorted angular nodes.
    """
    ring_radii: np.ndarray = field(repr=False)
    angles: np.ndarray = field(repr=False)
    vertices: np.ndarray = field(init=False, repr=False)
    triangles: np.ndarray = field(init=False, repr=False)
    triangle_areas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        radii = np.asarray(self.ring_radii, dtype=float).ravel()
        angles = np.asarray(self.angles, dtype=float).ravel()
        if len(radii) < 1 or radii[0] <= 0.0 or np.any(np.diff(radii) <= 0.0):
            raise InvalidGeometry("ring radii must be positive and strictly increasing")
        if abs(radii[-1] - 1.0) > 1e-12:
            raise InvalidGeometry("the outer ring must be the unit circle")
        if len(angles) < 3 or np.any(np.diff(angles) <= 0.0) or angles[-1] - angles[0] >= TWO_PI:
            raise InvalidGeometry("angular nodes must be >= 3, strictly increasing, within one turn")
        gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
        if gaps.max() >= math.pi:
            raise InvalidGeometry(f"angular gap {gaps.max():.6g} >= π would fold the mesh")
        radii[-1] = 1.0

        n, rings = len(angles), len(radii)
        rho = np.repeat(radii, n)
        theta = np.tile(angles, rings)
        vertices = np.vstack([[0.0, 0.0], np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])])

        i = np.arange(n)
        nxt = (i + 1) % n
        tris = [np.column_stack([np.zeros(n, dtype=int), 1 + i, 1 + nxt])]
        for j in range(rings - 1):
            a = 1 + j * n + i
            b = 1 + (j + 1) * n + i
            c = 1 + (j + 1) * n + nxt
            d = 1 + j * n + nxt
            tris.append(np.column_stack([a, b, c]))
            tris.append(np.column_stack([a, c, d]))
        triangles = np.vstack(tris)
        p, q, r = (vertices[triangles[:, k]] for k in range(3))
        areas = 0.5 * ((q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0]))

        for arr in (radii, angles, vertices, triangles, areas):
            arr.setflags(write=False)
        object.__setattr__(self, "ring_radii", radii)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)
        object.__setattr__(self, "triangle_areas", areas)

    @classmethod
    def polar(cls, n_rings: int, n_angular: int = 0,
              angles: Optional[Sequence[float]] = None) -> "DiskMesh":
        """Uniform rings j/n_rings; uniform angular nodes unless `angles` is given"""
        if n_rings < 1:
            raise InvalidGeometry("n_rings must be >= 1")
        if angles is None:
            if n_angular < 3:
                raise InvalidGeometry("n_angular must be >= 3")
            angles = np.arange(n_angular) * (TWO_PI / n_angular)
        return cls(np.arange(1, n_rings + 1) / n_rings, np.asarray(angles, dtype=float))

    @property
    def n_rings(self) -> int:
        return len(self.ring_radii)

    @property
    def n_angular(self) -> int:
        return len(self.angles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def ring_indices(self, j: int) -> np.ndarray:
        return 1 + j * self.n_angular + np.arange(self.n_angular)

    @property
    def boundary_vertices(self) -> np.ndarray:
        return self.ring_indices(self.n_rings - 1)

    @property
    def interior_vertices(self) -> np.ndarray:
        return np.arange(1 + (self.n_rings - 1) * self.n_angular)

    def polar_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """(ρ, θ) of every vertex; the center gets θ = angles[0]"""
        rho = np.concatenate([[0.0], np.repeat(self.ring_radii, self.n_angular)])
        theta = np.concatenate([[self.angles[0]], np.tile(self.angles, self.n_rings)])
        return rho, theta

    def stats(self) -> Dict[str, int]:
        return {
            "rings": self.n_rings,
            "angular": self.n_angular,
            "vertices": self.n_vertices,
            "triangles": len(self.triangles),
        }


# ============================================================================
# DISCRETE MAP
# ============================================================================

def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


@dataclass(frozen=True)
class DiscreteMap:
    """Piecewise affine competitor: one target point per mesh vertex"""
    mesh: DiskMesh
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1, 2)
        if len(values) != self.mesh.n_vertices:
            raise InvalidGeometry(f"expected {self.mesh.n_vertices} vertex values, got {len(values)}")
        if not np.all(np.isfinite(values)):
            raise InvalidGeometry("discrete map values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # ------------------------------------------------------------------------
    # Euclidean reading
    # ------------------------------------------------------------------------

    def image_signed_areas(self) -> np.ndarray:
        tri = self.mesh.triangles
        a, b, c = self.values[tri[:, 0]], self.values[tri[:, 1]], self.values[tri[:, 2]]
        return 0.5 * _cross(b - a, c - a)

    def jacobian_mass(self) -> float:
        return discrete_jacobian_mass(self)

    def boundary_values(self) -> np.ndarray:
        return self.values[self.mesh.boundary_vertices]

    def boundary_data(self) -> BoundaryData:
        return BoundaryData(self.mesh.angles, self.boundary_values())

    # ------------------------------------------------------------------------
    # Polar-parameter reading
    # ------------------------------------------------------------------------

    def _cells(self, points: np.ndarray, center, scale: float):
        mesh = self.mesh
        n = mesh.n_angular
        rel = (as_points(points) - np.asarray(center, dtype=float)) / scale
        rho = np.minimum(np.hypot(rel[:, 0], rel[:, 1]), 1.0)
        theta0 = mesh.angles[0]
        theta = theta0 + np.mod(np.arctan2(rel[:, 1], rel[:, 0]) - theta0, TWO_PI)

        ext = np.append(mesh.angles, theta0 + TWO_PI)
        i = np.clip(np.searchsorted(ext, theta, side="right") - 1, 0, n - 1)
        radii = np.concatenate([[0.0], mesh.ring_radii])
        j = np.clip(np.searchsorted(radii, rho, side="right") - 1, 0, mesh.n_rings - 1)

        dr = radii[j + 1] - radii[j]
        dtheta = ext[i + 1] - ext[i]
        s = np.clip((rho - radii[j]) / dr, 0.0, 1.0)
        t = np.clip((theta - ext[i]) / dtheta, 0.0, 1.0)

        nxt = (i + 1) % n
        vb = self.values[1 + j * n + i]
        vc = self.values[1 + j * n + nxt]
        inner = j > 0
        va = np.where(inner[:, None], self.values[1 + np.maximum(j - 1, 0) * n + i], self.values[0])
        vd = np.where(inner[:, None], self.values[1 + np.maximum(j - 1, 0) * n + nxt], self.values[0])
        return rho, theta, j, s, t, dr, dtheta, va, vb, vc, vd

    def evaluate(self, points, center: Sequence[float] = (0.0, 0.0), scale: float = 1.0) -> np.ndarray:
        """
        Polar-parameter evaluation of x ↦ v((x − center)/scale).

        Points farther than `scale` from the center are clamped radially to
        the boundary circle.
        """
        _, _, j, s, t, _, _, va, vb, vc, vd = self._cells(points, center, scale)
        s_, t_ = s[:, None], t[:, None]
        fan = va + s_ * ((1.0 - t_) * (vb - va) + t_ * (vc - va))
        upper = va + s_ * (vb - va) + t_ * (vc - vb)
        lower = va + t_ * (vd - va) + s_ * (vc - vd)
        ring = np.where((s >= t)[:, None], upper, lower)
        return np.where((j == 0)[:, None], fan, ring)

    def gradient(self, points, center: Sequence[float] = (0.0, 0.0), scale: float = 1.0) -> np.ndarray:
        """Analytic ∇ of the polar-parameter evaluation, shape (m, 2, 2)"""
        rho, theta, j, s, t, dr, dtheta, va, vb, vc, vd = self._cells(points, center, scale)
        s_, t_ = s[:, None], t[:, None]
        fan = j == 0
        upper = s >= t

        d_s = np.where(fan[:, None], (1.0 - t_) * (vb - va) + t_ * (vc - va),
                       np.where(upper[:, None], vb - va, vc - vd))
        d_t = np.where(upper[:, None], vc - vb, vd - va)
        d_rho = d_s / (dr * scale)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ring_rate = d_t / (dtheta * scale * np.maximum(rho, 1e-300))[:, None]
        # in the center cell ∂_θ v / ρ stays bounded: s·(vc − vb)/(Δθ·ρ) = (vc − vb)/(Δθ·r₁)
        fan_rate = (vc - vb) / (dtheta * scale * dr)[:, None]
        d_tan = np.where(fan[:, None], fan_rate, ring_rate)

        e_rho = np.column_stack([np.cos(theta), np.sin(theta)])
        e_tan = np.column_stack([-np.sin(theta), np.cos(theta)])
        return d_rho[:, :, None] * e_rho[:, None, :] + d_tan[:, :, None] * e_tan[:, None, :]

    def lipschitz_constant(self) -> float:
        """
        Bound on the Lipschitz constant of the polar-parameter evaluation:
        the largest Frobenius norm of the gradient over all cells.
        """
        mesh = self.mesh
        n = mesh.n_angular
        V = self.values
        gaps = np.diff(np.append(mesh.angles, mesh.angles[0] + TWO_PI))
        i = np.arange(n)
        nxt = (i + 1) % n

        r1 = mesh.ring_radii[0]
        vb, vc, v0 = V[1 + i], V[1 + nxt], V[0]
        radial = np.maximum(np.hypot(*(vb - v0).T), np.hypot(*(vc - v0).T)) / r1
        tangential = np.hypot(*(vc - vb).T) / (gaps * r1)
        best = float(np.max(np.hypot(radial, tangential)))

        for jj in range(1, mesh.n_rings):
            r_in, r_out = mesh.ring_radii[jj - 1], mesh.ring_radii[jj]
            dr = r_out - r_in
            va, vd = V[1 + (jj - 1) * n + i], V[1 + (jj - 1) * n + nxt]
            vb, vc = V[1 + jj * n + i], V[1 + jj * n + nxt]
            up = np.hypot(np.hypot(*(vb - va).T) / dr, np.hypot(*(vc - vb).T) / (gaps * r_in))
            lo = np.hypot(np.hypot(*(vc - vd).T) / dr, np.hypot(*(vd - va).T) / (gaps * r_in))
            best = max(best, float(up.max()), float(lo.max()))
        return best

    def pieces(self, center: Sequence[float] = (0.0, 0.0), scale: float = 1.0) -> List[RegionSpec]:
        """Regions of the scaled disk on which the polar-parameter evaluation is smooth"""
        mesh = self.mesh
        center = (float(center[0]), float(center[1]))
        ext = np.append(mesh.angles, mesh.angles[0] + TWO_PI)
        r1 = float(mesh.ring_radii[0])
        out: List[RegionSpec] = [
            AnnularSectorRegion(center, scale * r1, float(ext[i]), float(ext[i + 1]))
            for i in range(mesh.n_angular)
        ]
        for jj in range(1, mesh.n_rings):
            r_in, r_out = float(mesh.ring_radii[jj - 1]), float(mesh.ring_radii[jj])
            for i in range(mesh.n_angular):
                t0, t1 = float(ext[i]), float(ext[i + 1])
                a, b, c, d = (r_in, t0), (r_out, t0), (r_out, t1), (r_in, t1)
                out.append(PolarTriangleRegion(center, scale, a, b, c))
                out.append(PolarTriangleRegion(center, scale, a, c, d))
        return out


def discrete_jacobian_mass(discrete_map: DiscreteMap) -> float:
    """
    Σ_T |T|·|det ∇v_T|, i.e. the sum of absolute image areas.

    Raises:
        DegenerateTriangle: a source triangle has area below DEGENERATE_TRIANGLE_AREA
    """
    limit = get_settings().DEGENERATE_TRIANGLE_AREA
    areas = discrete_map.mesh.triangle_areas
    bad = np.flatnonzero(areas < limit)
    if bad.size:
        raise DegenerateTriangle(
            f"{bad.size} source triangles have area < {limit:g} (first: #{bad[0]}, area {areas[bad[0]]:.3g})"
        )
    return math.fsum(np.abs(discrete_map.image_signed_areas()))


# ============================================================================
# BUILDERS
# ============================================================================

BoundaryLike = Union[SampledCircleMap, BoundaryData, np.ndarray]


def _boundary_at_nodes(boundary: BoundaryLike, mesh: DiskMesh) -> np.ndarray:
    if isinstance(boundary, SampledCircleMap):
        if boundary.n_samples < mesh.n_angular:
            raise InvalidGeometry(
                f"boundary has {boundary.n_samples} samples, fewer than the mesh's {mesh.n_angular} angular nodes"
            )
        return boundary.evaluate(mesh.angles)
    if isinstance(boundary, BoundaryData):
        return boundary.evaluate(mesh.angles)
    values = as_points(boundary)
    if len(values) != mesh.n_angular:
        raise InvalidGeometry("boundary value array must have one entry per angular node")
    return values


def cone_extension(boundary: BoundaryLike, mesh: DiskMesh,
                   apex: Sequence[float] = (0.0, 0.0)) -> DiscreteMap:
    """
    v(ρ, θ) = apex + ρ·(φ(θ) − apex); with the default apex this is the
    cone v(x) = |x|·φ(x/|x|) and v(0) = 0.
    """
    phi = _boundary_at_nodes(boundary, mesh)
    apex = np.asarray(apex, dtype=float)
    rings = [apex + r * (phi - apex) for r in mesh.ring_radii]
    return DiscreteMap(mesh, np.vstack([apex[None, :]] + rings))


def lipschitz_transfer(competitor: DiscreteMap, boundary: BoundaryLike) -> DiscreteMap:
    """
    Competitor for new boundary data φ₁ from a competitor for φ₂: the old map
    shrunk into B_{1/2} and affine interpolation between φ₂ and φ₁ across the
    annulus 1/2 ≤ |x| ≤ 1. Both boundaries are read at the same angular nodes.
    """
    old = competitor.mesh
    mesh = DiskMesh(np.append(0.5 * old.ring_radii, 1.0), old.angles)
    phi1 = _boundary_at_nodes(boundary, mesh)
    return DiscreteMap(mesh, np.vstack([competitor.values, phi1]))
