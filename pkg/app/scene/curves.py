"""
Jump Curves and Traces

Arc-length parametrized source curves α_l (polylines and circular arcs), the
one-sided trace curves u_l± defined on the same parameter interval, and the
JumpCurve that ties them together.

Orientation: the plus trace is the limit from the left of α̇ (the side the
normal α̇ rotated by +90° points to).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import List, Optional, Sequence

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import InvalidGeometry
from app.geometry.maps import AffineMap, ConstantMap, PlanarMap
from app.geometry.primitives import as_points


# ============================================================================
# SOURCE CURVES
# ============================================================================

class SourceCurve:
    """Arc-length parametrized injective curve, parameter s ∈ [0, length]"""

    kind = "curve"

    @property
    def length(self) -> float:
        raise NotImplementedError

    def position(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tangent(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self) -> List[float]:
        """Parameters where the tangent may jump"""
        return []

    def start(self) -> np.ndarray:
        return self.position(np.array([0.0]))[0]

    def end(self) -> np.ndarray:
        return self.position(np.array([self.length]))[0]

    def normal(self, s: np.ndarray) -> np.ndarray:
        tan = self.tangent(s)
        return np.column_stack([-tan[:, 1], tan[:, 0]])

    def polyline(self, max_segment: float = 0.01) -> np.ndarray:
        """Samples including every breakpoint, for intersection tests and plots"""
        return self.position(np.array([0.0, self.length]))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PolylineCurve(SourceCurve):
    vertices: np.ndarray = field(repr=False)

    kind = "polyline"

    def __post_init__(self):
        verts = as_points(self.vertices)
        if len(verts) < 2:
            raise InvalidGeometry("a polyline curve needs >= 2 vertices")
        seg = np.hypot(*np.diff(verts, axis=0).T)
        if np.any(seg <= 0.0):
            raise InvalidGeometry("polyline curve has a zero-length segment")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def _segment(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.length)
        idx = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(self.vertices) - 2)
        return s, idx

    def position(self, s):
        s, idx = self._segment(s)
        a, b = self.vertices[idx], self.vertices[idx + 1]
        frac = (s - self._cum[idx]) / (self._cum[idx + 1] - self._cum[idx])
        return a + frac[:, None] * (b - a)

    def tangent(self, s):
        _, idx = self._segment(s)
        d = self.vertices[idx + 1] - self.vertices[idx]
        return d / np.hypot(d[:, 0], d[:, 1])[:, None]

    def breakpoints(self):
        return [float(c) for c in self._cum[1:-1]]

    def polyline(self, max_segment: float = 0.01):
        return np.asarray(self.vertices)

    def to_dict(self):
        return {"kind": self.kind, "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class CircularArcCurve(SourceCurve):
    """Arc of radius R from angle θ0 to θ1 (either direction), traversed at unit speed"""
    center: tuple
    radius: float
    theta0: float
    theta1: float

    kind = "arc"

    def __post_init__(self):
        if self.radius <= 0 or self.theta0 == self.theta1:
            raise InvalidGeometry("arc needs positive radius and θ0 != θ1")
        if abs(self.theta1 - self.theta0) >= 2 * math.pi:
            raise InvalidGeometry("arc must not close on itself")

    @property
    def _sign(self) -> float:
        return 1.0 if self.theta1 > self.theta0 else -1.0

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def _angle(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.length)
        return self.theta0 + self._sign * s / self.radius

    def position(self, s):
        t = self._angle(s)
        return np.column_stack([self.center[0] + self.radius * np.cos(t), self.center[1] + self.radius * np.sin(t)])

    def tangent(self, s):
        t = self._angle(s)
        return self._sign * np.column_stack([-np.sin(t), np.cos(t)])

    def polyline(self, max_segment: float = 0.01):
        n = max(8, int(math.ceil(self.length / max_segment)) + 1)
        return self.position(np.linspace(0.0, self.length, n))

    def to_dict(self):
        return {"kind": self.kind, "center": list(self.center), "radius": self.radius,
                "theta0": self.theta0, "theta1": self.theta1}


def check_arc_length(curve: SourceCurve, n_nodes: int = 64, tol: Optional[float] = None) -> float:
    """
    Largest deviation of the finite-difference speed |α̇| from 1 at sample nodes.

    Raises:
        InvalidGeometry: if the deviation reaches ARC_LENGTH_TOL
    """
    tol = get_settings().ARC_LENGTH_TOL if tol is None else tol
    h = 1e-5 * curve.length
    s = np.linspace(0.0, curve.length - h, n_nodes)
    kinks = np.asarray(curve.breakpoints())
    if kinks.size:
        s = s[np.min(np.abs(s[:, None] - kinks[None, :]), axis=1) > h]
        s = s[np.min(np.abs(s[:, None] + h - kinks[None, :]), axis=1) > h] if s.size else s
    if s.size == 0:
        return 0.0
    speed = np.hypot(*(curve.position(s + h) - curve.position(s)).T) / h
    # chord/arc defect of curved pieces is O(h²)
    worst = float(np.max(np.abs(speed - 1.0)))
    if worst >= tol:
        raise InvalidGeometry(f"curve is not arc-length parametrized (speed deviation {worst:.3g})")
    return worst


# ============================================================================
# TRACES
# ============================================================================

class Trace:
    """Target curve on the parameter interval [0, length] of its jump curve"""

    kind = "trace"

    def value(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self) -> List[float]:
        return []

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantTrace(Trace):
    constant: tuple

    kind = "constant"

    def value(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.tile(np.asarray(self.constant, dtype=float), (len(t), 1))

    def derivative(self, t):
        return np.zeros((len(np.atleast_1d(t)), 2))

    def to_dict(self):
        return {"kind": self.kind, "value": list(self.constant)}


@dataclass(frozen=True)
class LinearTrace(Trace):
    """Affine in t from `start` at t=0 to `end` at t=length"""
    start: tuple
    end: tuple
    length: float

    kind = "linear"

    def value(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = np.asarray(self.start, dtype=float), np.asarray(self.end, dtype=float)
        return a + (t / self.length)[:, None] * (b - a)

    def derivative(self, t):
        t = np.atleast_1d(t)
        slope = (np.asarray(self.end, dtype=float) - np.asarray(self.start, dtype=float)) / self.length
        return np.tile(slope, (len(t), 1))

    def to_dict(self):
        return {"kind": self.kind, "start": list(self.start), "end": list(self.end)}


@dataclass(frozen=True)
class PolylineTrace(Trace):
    """Piecewise linear in t through (params[i], values[i])"""
    params: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    kind = "polyline"

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float).ravel()
        values = as_points(self.values)
        if len(params) != len(values) or len(params) < 2 or np.any(np.diff(params) <= 0):
            raise InvalidGeometry("polyline trace needs >= 2 strictly increasing parameters with values")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "values", values)

    def value(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.column_stack([np.interp(t, self.params, self.values[:, 0]),
                                np.interp(t, self.params, self.values[:, 1])])

    def derivative(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        slopes = np.diff(self.values, axis=0) / np.diff(self.params)[:, None]
        idx = np.clip(np.searchsorted(self.params, t, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    def breakpoints(self):
        return [float(p) for p in self.params[1:-1]]

    def to_dict(self):
        return {"kind": self.kind, "params": self.params.tolist(), "values": self.values.tolist()}


@dataclass(frozen=True)
class MapTrace(Trace):
    """
    One-sided trace of a region map along a source curve.

    Constant and affine maps are continuous up to the curve, so their trace
    is evaluated on the curve itself; other maps are sampled at a small
    offset along the normal, on the requested side.
    """
    region_map: PlanarMap
    curve: SourceCurve
    side: float  # +1 left of α̇, -1 right
    offset: Optional[float] = None

    kind = "regions"

    @property
    def _offset(self) -> float:
        return get_settings().TRACE_OFFSET if self.offset is None else self.offset

    def _points(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        base = self.curve.position(t)
        if isinstance(self.region_map, (ConstantMap, AffineMap)):
            return base
        return base + self.side * self._offset * self.curve.normal(t)

    def value(self, t):
        return self.region_map.evaluate(self._points(t))

    def derivative(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        grad = self.region_map.gradient(self._points(t))
        return np.einsum("mij,mj->mi", grad, self.curve.tangent(t))

    def breakpoints(self):
        return self.curve.breakpoints()

    def to_dict(self):
        return {"kind": self.kind}


def trace_from_dict(data: dict, length: float) -> Trace:
    kind = data.get("kind")
    if kind == "constant":
        return ConstantTrace(tuple(float(x) for x in data["value"]))
    if kind == "linear":
        return LinearTrace(tuple(data["start"]), tuple(data["end"]), float(length))
    if kind == "polyline":
        return PolylineTrace(np.asarray(data["params"], dtype=float), np.asarray(data["values"], dtype=float))
    raise InvalidGeometry(f"unknown trace kind {kind!r}")


def curve_from_dict(data: dict) -> SourceCurve:
    kind = data.get("kind")
    if kind == "polyline":
        return PolylineCurve(np.asarray(data["vertices"], dtype=float))
    if kind == "arc":
        return CircularArcCurve(tuple(data["center"]), float(data["radius"]),
                                float(data["theta0"]), float(data["theta1"]))
    raise InvalidGeometry(f"unknown curve kind {kind!r}")


# ============================================================================
# JUMP CURVE
# ============================================================================

@dataclass(frozen=True)
class JumpCurve:
    """
    Source curve α_l with its two traces.

    The parameter interval is [a, b] with b − a equal to the curve length;
    traces are indexed by t − a.
    """
    id: str
    alpha: SourceCurve
    trace_minus: Optional[Trace] = None
    trace_plus: Optional[Trace] = None
    a: float = 0.0

    @property
    def b(self) -> float:
        return self.a + self.alpha.length

    @property
    def length(self) -> float:
        return self.alpha.length

    @property
    def has_traces(self) -> bool:
        return self.trace_minus is not None and self.trace_plus is not None

    def _local(self, t) -> np.ndarray:
        return np.atleast_1d(np.asarray(t, dtype=float)) - self.a

    def jump(self, t) -> np.ndarray:
        """d(t) = u⁺(t) − u⁻(t)"""
        s = self._local(t)
        return self.trace_plus.value(s) - self.trace_minus.value(s)

    def trace_derivatives(self, t):
        s = self._local(t)
        return self.trace_plus.derivative(s), self.trace_minus.derivative(s)

    def breakpoints(self) -> List[float]:
        local = set(self.alpha.breakpoints())
        for trace in (self.trace_minus, self.trace_plus):
            if trace is not None:
                local.update(trace.breakpoints())
        return sorted(self.a + p for p in local if 0.0 < p < self.length)

    def with_traces(self, minus: Trace, plus: Trace) -> "JumpCurve":
        return JumpCurve(self.id, self.alpha, minus, plus, self.a)

    def split(self, at: float) -> Sequence["JumpCurve"]:
        """Two polyline halves at parameter `at`; traces must be explicit"""
        if not isinstance(self.alpha, PolylineCurve):
            raise InvalidGeometry("only polyline curves can be split")
        cut = at - self.a
        if not 0.0 < cut < self.length:
            raise InvalidGeometry("split parameter must lie inside the curve")
        verts = self.alpha.vertices
        cum = self.alpha._cum
        p = self.alpha.position(np.array([cut]))[0]
        left = np.vstack([verts[cum < cut], p])
        right = np.vstack([p, verts[cum > cut]])
        first = JumpCurve(f"{self.id}a", PolylineCurve(left),
                          _ShiftedTrace(self.trace_minus, 0.0), _ShiftedTrace(self.trace_plus, 0.0), self.a)
        second = JumpCurve(f"{self.id}b", PolylineCurve(right),
                           _ShiftedTrace(self.trace_minus, cut), _ShiftedTrace(self.trace_plus, cut), at)
        return first, second


@dataclass(frozen=True)
class _ShiftedTrace(Trace):
    base: Trace
    shift: float

    kind = "shifted"

    def value(self, t):
        return self.base.value(np.atleast_1d(np.asarray(t, dtype=float)) + self.shift)

    def derivative(self, t):
        return self.base.derivative(np.atleast_1d(np.asarray(t, dtype=float)) + self.shift)

    def breakpoints(self):
        return [p - self.shift for p in self.base.breakpoints() if p > self.shift]

    def to_dict(self):
        return self.base.to_dict()
