"""
Recovery Maps

Explicit Lipschitz maps that realize the relaxed area from above:

- v_ε for a straight jump: u away from the strip |σ| < ε, affine in σ across it;
- γ_k: piecewise affine mollification of piecewise constant circle data;
- u_k for an n-uple point: γ_k(x/|x|) on the annulus B_r∖B_{ρ_k} and a
  rescaled Plateau competitor inside B_{ρ_k}.

Every map exposes `pieces()`, regions on which it is smooth, so that all
integrals over it split along the known interfaces.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import BoundaryMismatch, InvalidGeometry, InvalidScene, WindowOverlap
from app.geometry.maps import PlanarMap, RadialAngularMap, gradient_norm, jacobian_determinant
from app.geometry.primitives import TWO_PI, PiecewiseConstantCircleMap, SampledCircleMap, as_points
from app.geometry.regions import AnnularSectorRegion, PolygonRegion, RegionSpec
from app.plateau.closed_form import analyze_loop
from app.plateau.loops import tilde_gamma
from app.plateau.mesh import DiscreteMap
from app.plateau.optimizer import PlateauOptions, plateau_upper
from app.scene.library import merge_repeated_values
from app.scene.model import Scene

logger = logging.getLogger(__name__)

BOUNDARY_MATCH_TOL = 1e-9
SLICE_FRACTIONS = (0.25, 0.5, 0.75)


class RecoveryMap(ABC):
    """One element of a recovery sequence"""

    @property
    @abstractmethod
    def parameter(self) -> float:
        """ε for strips, k for n-uple points"""

    @property
    @abstractmethod
    def scale(self) -> float:
        """Length scale that goes to zero along the sequence (ε or 1/k)"""

    @abstractmethod
    def evaluate(self, points) -> np.ndarray:
        ...

    @abstractmethod
    def gradient(self, points) -> np.ndarray:
        ...

    @abstractmethod
    def pieces(self) -> List[RegionSpec]:
        ...

    @abstractmethod
    def slice_circles(self) -> List[Tuple[Tuple[float, float], float]]:
        """(center, radius) of the circles used for slice checks"""

    def jacobian(self, points) -> np.ndarray:
        return jacobian_determinant(self.gradient(points))

    def area_density(self, points) -> np.ndarray:
        grad = self.gradient(points)
        return np.sqrt(1.0 + np.einsum("mij,mij->m", grad, grad) + self.jacobian(points) ** 2)

    def gradient_norm(self, points) -> np.ndarray:
        return gradient_norm(self.gradient(points))


# ============================================================================
# STRAIGHT JUMP
# ============================================================================

@dataclass(frozen=True)
class StraightJumpRecovery(RecoveryMap):
    """v_ε on R = [a, b] × [−1, 1]"""
    a: float
    b: float
    upper: PlanarMap
    lower: PlanarMap
    eps: float

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise InvalidGeometry(f"strip half-width must lie in (0, 1), got {self.eps}")

    @property
    def parameter(self) -> float:
        return self.eps

    @property
    def scale(self) -> float:
        return self.eps

    def _edges(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        top = np.column_stack([x, np.full(len(x), self.eps)])
        bottom = np.column_stack([x, np.full(len(x), -self.eps)])
        return top, bottom

    def evaluate(self, points) -> np.ndarray:
        pts = as_points(points)
        sigma = pts[:, 1]
        top, bottom = self._edges(pts[:, 0])
        weight = ((self.eps + sigma) / (2.0 * self.eps))[:, None]
        blend = weight * self.upper.evaluate(top) + (1.0 - weight) * self.lower.evaluate(bottom)
        out = np.where((sigma >= self.eps)[:, None], self.upper.evaluate(pts), blend)
        return np.where((sigma <= -self.eps)[:, None], self.lower.evaluate(pts), out)

    def gradient(self, points) -> np.ndarray:
        pts = as_points(points)
        sigma = pts[:, 1]
        top, bottom = self._edges(pts[:, 0])
        weight = ((self.eps + sigma) / (2.0 * self.eps))[:, None]

        strip = np.empty((len(pts), 2, 2))
        d_plus = self.upper.gradient(top)[:, :, 0]
        d_minus = self.lower.gradient(bottom)[:, :, 0]
        strip[:, :, 0] = weight * d_plus + (1.0 - weight) * d_minus
        strip[:, :, 1] = (self.upper.evaluate(top) - self.lower.evaluate(bottom)) / (2.0 * self.eps)

        out = np.where((sigma >= self.eps)[:, None, None], self.upper.gradient(pts), strip)
        return np.where((sigma <= -self.eps)[:, None, None], self.lower.gradient(pts), out)

    def pieces(self) -> List[RegionSpec]:
        a, b, e = self.a, self.b, self.eps
        bands = [(e, 1.0), (0.0, e), (-e, 0.0), (-1.0, -e)]
        return [PolygonRegion(np.array([[a, lo], [b, lo], [b, hi], [a, hi]])) for lo, hi in bands]

    def slice_circles(self) -> List[Tuple[Tuple[float, float], float]]:
        center = (0.5 * (self.a + self.b), 0.0)
        reach = min(0.5 * (self.b - self.a), 1.0)
        return [(center, f * reach) for f in SLICE_FRACTIONS]


def straight_jump_recovery(scene: Scene, eps: float) -> StraightJumpRecovery:
    """
    Strip interpolation of a straight-jump scene.

    Args:
        scene: built by straight_jump_scene (regions "upper" and "lower")
        eps: strip half-width in (0, 1)

    Returns:
        StraightJumpRecovery: equal to u for |σ| >= ε, affine in σ inside

    Raises:
        InvalidScene: the scene is not a straight jump on [a, b] × [−1, 1]
    """
    if scene.metadata.get("kind") != "straight-jump":
        raise InvalidScene(f"scene '{scene.name}' is not a straight jump")
    maps = {entry.id: entry.map for entry in scene.regions}
    if set(maps) != {"upper", "lower"}:
        raise InvalidScene("a straight-jump scene needs exactly the regions 'upper' and 'lower'")
    return StraightJumpRecovery(float(scene.metadata["a"]), float(scene.metadata["b"]),
                                maps["upper"], maps["lower"], float(eps))


def straight_jump_sequence(scene: Scene,
                           eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3)) -> List[StraightJumpRecovery]:
    return [straight_jump_recovery(scene, eps) for eps in eps_list]


# ============================================================================
# MOLLIFIED CIRCLE DATA
# ============================================================================

def gamma_k(gamma: PiecewiseConstantCircleMap, k: int) -> SampledCircleMap:
    """
    Piecewise affine γ_k with transition windows of width δ = 2/k.

    Each window is centered at a jump and interpolates linearly between the
    neighbouring values; γ_k = γ elsewhere. The jump angles themselves are
    kept as nodes so that the windows split exactly at the jumps of γ.

    Args:
        gamma: piecewise constant circle data
        k: sequence index >= 1

    Returns:
        SampledCircleMap: γ_k, with |γ̇_k|(𝕊¹) = L(γ)

    Raises:
        WindowOverlap: δ >= the smallest arc
    """
    if k < 1:
        raise InvalidGeometry("k must be >= 1")
    gamma = merge_repeated_values(gamma)
    n = gamma.n_values
    if n == 1:
        theta = np.arange(SampledCircleMap.MIN_SAMPLES) * (TWO_PI / SampledCircleMap.MIN_SAMPLES)
        return SampledCircleMap(theta, np.tile(gamma.values[0], (len(theta), 1)))

    delta = 2.0 / k
    smallest = float(gamma.arc_angles.min())
    if delta >= smallest:
        raise WindowOverlap(f"window width 2/k = {delta:.6g} >= smallest arc {smallest:.6g}")

    starts = gamma.breakpoints()
    per_arc = max(1, math.ceil((SampledCircleMap.MIN_SAMPLES - 2 * n) / n))
    angles, values = [], []
    for k_arc in range(n):
        lo = starts[k_arc] + 0.5 * delta
        hi = starts[k_arc] + gamma.arc_angles[k_arc] - 0.5 * delta
        flat = np.linspace(lo, hi, per_arc + 2)
        angles.append(flat)
        values.append(np.tile(gamma.values[k_arc], (len(flat), 1)))
        # jump into this arc: midpoint of the previous and current value
        angles.append([starts[k_arc]])
        values.append([0.5 * (gamma.values[k_arc - 1] + gamma.values[k_arc])])

    angles = np.mod(np.concatenate(angles), TWO_PI)
    values = np.vstack(values)
    order = np.argsort(angles, kind="stable")
    result = SampledCircleMap(angles[order], values[order])
    logger.debug("γ_k for k=%d: δ=%.4g, nodes at %s, TV %.12g", k, delta, result.angles, result.total_variation())
    return result


def window_mask(gamma: PiecewiseConstantCircleMap, k: int, theta) -> np.ndarray:
    """True where θ lies within δ/2 = 1/k of a jump of γ"""
    gamma = merge_repeated_values(gamma)
    theta = np.asarray(theta, dtype=float)
    if gamma.n_values == 1:
        return np.zeros(theta.shape, dtype=bool)
    diff = np.mod(theta[..., None] - gamma.breakpoints() + math.pi, TWO_PI) - math.pi
    return np.any(np.abs(diff) < 1.0 / k, axis=-1)


# ============================================================================
# n-UPLE POINT
# ============================================================================

@dataclass(frozen=True)
class NUpleRecovery(RecoveryMap):
    """u_k on B_r(center)"""
    gamma: PiecewiseConstantCircleMap
    r: float
    k: int
    competitor: DiscreteMap = field(repr=False)
    center: Tuple[float, float] = (0.0, 0.0)
    profile: SampledCircleMap = field(init=False, repr=False)
    lipschitz: float = field(init=False)
    rho: float = field(init=False)

    def __post_init__(self):
        if self.r <= 0:
            raise InvalidGeometry("radius must be positive")
        profile = gamma_k(self.gamma, self.k)
        data = self.competitor.boundary_data()
        mismatch = max(
            float(np.max(np.abs(data.evaluate(profile.angles) - profile.values))),
            float(np.max(np.abs(profile.evaluate(data.angles) - data.values))),
        )
        if mismatch > BOUNDARY_MATCH_TOL:
            raise BoundaryMismatch(f"competitor boundary differs from γ_k by {mismatch:.3g}")

        c_k = self.competitor.lipschitz_constant()
        rho = min(0.5 * self.r, 1.0 / (self.k * max(1.0, c_k)))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "lipschitz", c_k)
        object.__setattr__(self, "rho", rho)
        logger.debug(f"u_k for k={self.k}: c_k={c_k:.6g}, ρ_k={rho:.6g}, c_k·ρ_k={c_k * rho:.3g}")

    @property
    def parameter(self) -> float:
        return float(self.k)

    @property
    def scale(self) -> float:
        return 1.0 / self.k

    @property
    def outer(self) -> RadialAngularMap:
        return RadialAngularMap(self.profile, self.center)

    def _inside(self, points: np.ndarray) -> np.ndarray:
        rel = points - np.asarray(self.center)
        return np.hypot(rel[:, 0], rel[:, 1]) < self.rho

    def evaluate(self, points) -> np.ndarray:
        pts = as_points(points)
        inner = self.competitor.evaluate(pts, self.center, self.rho)
        return np.where(self._inside(pts)[:, None], inner, self.outer.evaluate(pts))

    def gradient(self, points) -> np.ndarray:
        pts = as_points(points)
        inner = self.competitor.gradient(pts, self.center, self.rho)
        return np.where(self._inside(pts)[:, None, None], inner, self.outer.gradient(pts))

    def annulus_pieces(self) -> List[RegionSpec]:
        """Sectors of B_r∖B_{ρ_k} between consecutive nodes of γ_k"""
        ext = np.append(self.profile.angles, self.profile.angles[0] + TWO_PI)
        return [
            AnnularSectorRegion(self.center, self.r, float(t0), float(t1), r_in=self.rho)
            for t0, t1 in zip(ext[:-1], ext[1:])
        ]

    def pieces(self) -> List[RegionSpec]:
        return self.annulus_pieces() + self.competitor.pieces(self.center, self.rho)

    def slice_circles(self) -> List[Tuple[Tuple[float, float], float]]:
        return [(self.center, f * self.r) for f in SLICE_FRACTIONS]


def n_uple_recovery(gamma: PiecewiseConstantCircleMap, r: float, k: int, competitor: DiscreteMap,
                    center: Sequence[float] = (0.0, 0.0)) -> NUpleRecovery:
    """
    Recovery map of the n-uple point γ(x/|x|) on B_r.

    Args:
        gamma: piecewise constant circle data
        r: disk radius
        k: sequence index; ρ_k = min(r/2, 1/(k·max(1, c_k)))
        competitor: discrete Plateau competitor whose boundary is γ_k
        center: disk center

    Raises:
        BoundaryMismatch: the competitor's boundary is not γ_k
        WindowOverlap: 2/k >= smallest arc of γ
    """
    return NUpleRecovery(gamma, float(r), int(k), competitor, tuple(center))


def n_uple_sequence(gamma: PiecewiseConstantCircleMap, r: float = 1.0, k_list: Sequence[int] = (10, 40, 160),
                    options: Optional[PlateauOptions] = None,
                    center: Sequence[float] = (0.0, 0.0)) -> List[NUpleRecovery]:
    """
    u_k for every k, each with the best discrete competitor for γ_k.

    With options.optimize == "auto" the optimizer is skipped when γ̃ has a
    closed form: the cone and constructive competitors attain it.
    """
    options = options or PlateauOptions()
    if options.optimize == "auto" and analyze_loop(tilde_gamma(gamma)) is not None:
        options = options.model_copy(update={"optimize": "never"})
    sequence = []
    for k in k_list:
        upper = plateau_upper(gamma_k(gamma, k), options)
        logger.info(f"n-uple recovery k={k}: competitor mass {upper.mass:.10g} via {upper.method}")
        sequence.append(n_uple_recovery(gamma, r, k, upper.competitor, center))
    return sequence
