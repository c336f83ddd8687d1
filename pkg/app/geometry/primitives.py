"""
Planar Primitives

Points, closed polygonal loops, sampled circle maps and piecewise constant
circle data, plus the length (total variation) of a sampled curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from app.core.exceptions import InvalidGeometry

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Point2:
    """A point of the source or target plane"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidGeometry(f"non-finite point ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def of(cls, value) -> "Point2":
        if isinstance(value, Point2):
            return value
        x, y = value
        return cls(float(x), float(y))


def as_points(values) -> np.ndarray:
    """Coerce Point2 lists, tuples or arrays to a float (n, 2) array"""
    if isinstance(values, np.ndarray):
        arr = np.asarray(values, dtype=float)
    else:
        arr = np.array(
            [v.as_array() if isinstance(v, Point2) else (float(v[0]), float(v[1])) for v in values],
            dtype=float,
        )
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise InvalidGeometry("points must have finite coordinates")
    return arr


def curve_tv(samples) -> float:
    """
    Total variation of a sampled curve: the sum of consecutive distances.

    For closed curves the caller appends the first sample at the end.
    """
    pts = as_points(samples)
    if len(pts) < 2:
        raise InvalidGeometry("curve_tv needs at least 2 samples")
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


def _collapse_consecutive(vertices: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Drop vertices equal to their predecessor (cyclically)"""
    if len(vertices) == 0:
        return vertices
    keep = [0]
    for i in range(1, len(vertices)):
        if np.hypot(*(vertices[i] - vertices[keep[-1]])) > tol:
            keep.append(i)
    out = vertices[keep]
    while len(out) > 1 and np.hypot(*(out[-1] - out[0])) <= tol:
        out = out[:-1]
    return out


@dataclass(frozen=True)
class BoundaryLoop:
    """
    Closed polyline in the target plane.

    The last vertex connects back to the first. Repeated traversals are
    spelled out as repeated edges; zero-length edges are collapsed on
    construction, so a loop is either a single point or has >= 2 distinct
    consecutive vertices.
    """
    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        verts = _collapse_consecutive(as_points(self.vertices))
        if len(verts) == 0:
            raise InvalidGeometry("a loop needs at least one vertex")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_points(cls, points: Iterable) -> "BoundaryLoop":
        return cls(as_points(list(points)))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def is_degenerate(self) -> bool:
        """Single point (all values equal) or back-and-forth segment"""
        return self.n_vertices < 3

    def edges(self) -> Tuple[np.ndarray, np.ndarray]:
        """Edge start and end points, (n, 2) each"""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def edge_lengths(self) -> np.ndarray:
        start, end = self.edges()
        return np.hypot(*(end - start).T)

    @property
    def length(self) -> float:
        if self.n_vertices == 1:
            return 0.0
        return float(self.edge_lengths().sum())

    def signed_area(self) -> float:
        """Shoelace area (winding-weighted)"""
        x, y = self.vertices.T
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def bbox(self) -> Tuple[float, float, float, float]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def closed_samples(self) -> np.ndarray:
        return np.vstack([self.vertices, self.vertices[:1]])

    def transformed(self, scale: float = 1.0, rotation: float = 0.0,
                    shift: Sequence[float] = (0.0, 0.0)) -> "BoundaryLoop":
        c, s = math.cos(rotation), math.sin(rotation)
        rot = np.array([[c, -s], [s, c]])
        return BoundaryLoop(scale * self.vertices @ rot.T + np.asarray(shift, dtype=float))

    def reversed(self) -> "BoundaryLoop":
        return BoundaryLoop(self.vertices[::-1].copy())

    def repeated(self, times: int) -> "BoundaryLoop":
        if times < 1:
            raise InvalidGeometry("repeat count must be >= 1")
        return BoundaryLoop(np.vstack([self.vertices] * times))

    def point_at_fraction(self, fractions: np.ndarray) -> np.ndarray:
        """Points at normalized arc-length positions in [0, 1) along the loop"""
        fractions = np.mod(np.asarray(fractions, dtype=float), 1.0)
        if self.n_vertices == 1:
            return np.repeat(self.vertices, len(fractions), axis=0)
        lengths = self.edge_lengths()
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        total = cum[-1]
        closed = self.closed_samples()
        xs = np.interp(fractions * total, cum, closed[:, 0])
        ys = np.interp(fractions * total, cum, closed[:, 1])
        return np.column_stack([xs, ys])

    def vertex_fractions(self) -> np.ndarray:
        """Normalized arc-length position of every vertex"""
        if self.n_vertices == 1:
            return np.zeros(1)
        cum = np.concatenate([[0.0], np.cumsum(self.edge_lengths())])
        return cum[:-1] / cum[-1]


@dataclass(frozen=True)
class SampledCircleMap:
    """
    Map from the unit circle to the plane given by samples.

    Angles are strictly increasing in [0, 2π); values are linearly
    interpolated in angle (periodically) between samples.
    """
    angles: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    MIN_SAMPLES = 8

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).ravel()
        values = as_points(self.values)
        if len(angles) != len(values):
            raise InvalidGeometry("angles and values must have the same length")
        if len(angles) < self.MIN_SAMPLES:
            raise InvalidGeometry(f"a sampled circle map needs >= {self.MIN_SAMPLES} samples")
        if angles[0] < 0.0 or angles[-1] >= TWO_PI:
            raise InvalidGeometry("sample angles must lie in [0, 2π)")
        if np.any(np.diff(angles) <= 0.0):
            raise InvalidGeometry("sample angles must be strictly increasing")
        angles.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, n_samples: int) -> "SampledCircleMap":
        """Sample a vectorized function of the angle at n uniform angles"""
        theta = np.arange(n_samples) * (TWO_PI / n_samples)
        return cls(theta, as_points(func(theta)))

    @classmethod
    def from_loop(cls, loop: BoundaryLoop, n_samples: int) -> "SampledCircleMap":
        """Constant-speed parametrization of a loop over the circle"""
        theta = np.arange(n_samples) * (TWO_PI / n_samples)
        return cls(theta, loop.point_at_fraction(theta / TWO_PI))

    @property
    def n_samples(self) -> int:
        return len(self.angles)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        xs = np.interp(theta, self.angles, self.values[:, 0], period=TWO_PI)
        ys = np.interp(theta, self.angles, self.values[:, 1], period=TWO_PI)
        return np.column_stack([xs, ys])

    def total_variation(self) -> float:
        return curve_tv(np.vstack([self.values, self.values[:1]]))

    def reparametrized(self, h) -> "SampledCircleMap":
        """
        Samples of φ∘h at the same angles.

        `h` must be a strictly increasing map of [0, 2π) onto itself (mod 2π).
        """
        return SampledCircleMap(self.angles, self.evaluate(h(self.angles)))


@dataclass(frozen=True)
class PiecewiseConstantCircleMap:
    """
    Piecewise constant circle data: value β_k on the k-th arc.

    The arcs follow counterclockwise from `start_angle` with angular sizes
    `arc_angles` (summing to 2π). Jumps sit at the arc endpoints.
    """
    values: np.ndarray = field(repr=False)
    arc_angles: np.ndarray = field(repr=False)
    start_angle: float = 0.0

    ANGLE_SUM_TOL = 1e-9

    def __post_init__(self):
        values = as_points(self.values)
        arcs = np.asarray(self.arc_angles, dtype=float).ravel()
        if len(values) < 1:
            raise InvalidGeometry("piecewise constant circle data needs >= 1 value")
        if len(values) != len(arcs):
            raise InvalidGeometry("values and arc angles must have the same length")
        if np.any(arcs <= 0.0):
            raise InvalidGeometry("arc angles must be positive")
        if abs(arcs.sum() - TWO_PI) > self.ANGLE_SUM_TOL:
            raise InvalidGeometry(f"arc angles sum to {arcs.sum():.12g}, expected 2π")
        values.setflags(write=False)
        arcs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "arc_angles", arcs)
        object.__setattr__(self, "start_angle", float(self.start_angle) % TWO_PI)

    @classmethod
    def uniform(cls, values, start_angle: float = 0.0) -> "PiecewiseConstantCircleMap":
        values = as_points(values)
        return cls(values, np.full(len(values), TWO_PI / len(values)), start_angle)

    @property
    def n_values(self) -> int:
        return len(self.values)

    def breakpoints(self) -> np.ndarray:
        """Angle where each arc starts (the jump from the previous value)"""
        return self.start_angle + np.concatenate([[0.0], np.cumsum(self.arc_angles)[:-1]])

    def evaluate(self, theta) -> np.ndarray:
        rel = np.mod(np.asarray(theta, dtype=float) - self.start_angle, TWO_PI)
        edges = np.cumsum(self.arc_angles)
        idx = np.minimum(np.searchsorted(edges, rel, side="right"), self.n_values - 1)
        return self.values[idx]

    def jump_sizes(self) -> np.ndarray:
        """|β_{k+1} − β_k| for every breakpoint, cyclically"""
        return np.hypot(*(np.roll(self.values, -1, axis=0) - self.values).T)

    def jump_length(self) -> float:
        """L(γ): sum of the jump sizes, i.e. the total variation on the circle"""
        if self.n_values == 1:
            return 0.0
        return float(self.jump_sizes().sum())

    def sampled(self, n_samples: int) -> SampledCircleMap:
        theta = np.arange(n_samples) * (TWO_PI / n_samples)
        return SampledCircleMap(theta, self.evaluate(theta))

    def scaled_values(self, factor: float) -> "PiecewiseConstantCircleMap":
        return PiecewiseConstantCircleMap(self.values * factor, self.arc_angles, self.start_angle)

    def as_list(self) -> List[Tuple[Tuple[float, float], float]]:
        return [((float(v[0]), float(v[1])), float(a)) for v, a in zip(self.values, self.arc_angles)]
