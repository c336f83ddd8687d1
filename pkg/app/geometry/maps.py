"""
Planar Maps

Vectorized maps of the source plane into ℝ² with their gradients, plus the
pointwise quantities the area and total-variation integrals are built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Callable, Optional, Protocol, Union, runtime_checkable

import numpy as np

from app.core.config import get_settings
from app.geometry.primitives import (
    TWO_PI,
    PiecewiseConstantCircleMap,
    SampledCircleMap,
    as_points,
)

logger = logging.getLogger(__name__)


@runtime_checkable
class PlanarMap(Protocol):
    """Anything that evaluates u and ∇u on (m, 2) arrays of source points"""

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        ...

    def gradient(self, points: np.ndarray) -> np.ndarray:
        ...


# ============================================================================
# POINTWISE QUANTITIES
# ============================================================================

def jacobian_determinant(grad: np.ndarray) -> np.ndarray:
    """det ∇u for gradients of shape (m, 2, 2)"""
    return grad[:, 0, 0] * grad[:, 1, 1] - grad[:, 0, 1] * grad[:, 1, 0]


def gradient_norm(grad: np.ndarray) -> np.ndarray:
    """Frobenius norm |∇u|"""
    return np.sqrt(np.einsum("mij,mij->m", grad, grad))


def area_density(grad: np.ndarray) -> np.ndarray:
    """√(1 + |∇u|² + (det ∇u)²), the graph area element"""
    return np.sqrt(1.0 + np.einsum("mij,mij->m", grad, grad) + jacobian_determinant(grad) ** 2)


# ============================================================================
# IMPLEMENTATIONS
# ============================================================================

@dataclass(frozen=True)
class ConstantMap:
    value: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "value", as_points([self.value])[0])

    def evaluate(self, points):
        return np.tile(self.value, (len(as_points(points)), 1))

    def gradient(self, points):
        return np.zeros((len(as_points(points)), 2, 2))


@dataclass(frozen=True)
class AffineMap:
    """u(x) = A x + b"""
    matrix: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(matrix)):
            raise ValueError("affine matrix must be finite")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offset", as_points([self.offset])[0])

    def evaluate(self, points):
        return as_points(points) @ self.matrix.T + self.offset

    def gradient(self, points):
        return np.broadcast_to(self.matrix, (len(as_points(points)), 2, 2)).copy()


@dataclass(frozen=True)
class RadialAngularMap:
    """
    Map homogeneous of degree zero around a center: u(x) = φ(angle of x − c).

    φ is either sampled (piecewise linear in angle) or piecewise constant.
    """
    profile: Union[SampledCircleMap, PiecewiseConstantCircleMap]
    center: tuple = (0.0, 0.0)

    def _polar(self, points):
        rel = as_points(points) - np.asarray(self.center, dtype=float)
        return np.hypot(rel[:, 0], rel[:, 1]), np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)

    def evaluate(self, points):
        _, theta = self._polar(points)
        return self.profile.evaluate(theta)

    def angular_derivative(self, theta: np.ndarray) -> np.ndarray:
        """dφ/dθ (zero for piecewise constant profiles away from the jumps)"""
        if isinstance(self.profile, PiecewiseConstantCircleMap):
            return np.zeros((len(theta), 2))
        angles = np.append(self.profile.angles, self.profile.angles[0] + TWO_PI)
        values = np.vstack([self.profile.values, self.profile.values[:1]])
        slopes = np.diff(values, axis=0) / np.diff(angles)[:, None]
        rel = np.mod(theta - angles[0], TWO_PI) + angles[0]
        idx = np.clip(np.searchsorted(angles, rel, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    def gradient(self, points):
        rho, theta = self._polar(points)
        dphi = self.angular_derivative(theta)
        safe = np.where(rho > 0, rho, np.inf)
        dtheta = np.column_stack([-np.sin(theta), np.cos(theta)]) / safe[:, None]
        return dphi[:, :, None] * dtheta[:, None, :]


@dataclass(frozen=True)
class CallableMap:
    """
    User-supplied vectorized map; the gradient is taken by central differences
    with step h (default GRADIENT_STEP) unless an analytic one is supplied.
    """
    func: Callable[[np.ndarray], np.ndarray]
    grad_func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    step: Optional[float] = None
    name: str = "callable"

    def evaluate(self, points):
        pts = as_points(points)
        return np.asarray(self.func(pts), dtype=float).reshape(len(pts), 2)

    def gradient(self, points):
        pts = as_points(points)
        if self.grad_func is not None:
            return np.asarray(self.grad_func(pts), dtype=float).reshape(len(pts), 2, 2)
        h = get_settings().GRADIENT_STEP if self.step is None else self.step
        grad = np.empty((len(pts), 2, 2))
        for j in range(2):
            shift = np.zeros(2)
            shift[j] = h
            grad[:, :, j] = (self.evaluate(pts + shift) - self.evaluate(pts - shift)) / (2.0 * h)
        return grad
