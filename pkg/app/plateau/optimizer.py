"""
Plateau Mesh Optimizer

Discrete upper bounds for P(φ): minimize the smoothed Jacobian mass

    Σ_T |T|·(√(J_T² + ε²) − ε),   J_T = det ∇v_T

over interior vertex values with the boundary fixed, through a decreasing
smoothing schedule (warm-started), from a fixed seeded set of starts. The
reported bound is always the exact (unsmoothed) mass of the best final
iterate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.optimize import minimize

from app.core.config import get_settings
from app.core.exceptions import NonConvergence
from app.geometry.primitives import TWO_PI, BoundaryLoop, SampledCircleMap
from app.plateau.constructive import bouquet_competitor
from app.plateau.loops import loop_boundary_data
from app.plateau.mesh import BoundaryData, DiscreteMap, DiskMesh, cone_extension, discrete_jacobian_mass

logger = logging.getLogger(__name__)

_STALL_WINDOW = 10
_STALL_DECREASE = 1e-6


# ============================================================================
# OPTIONS
# ============================================================================

class PlateauOptions(BaseModel):
    """Per-call Plateau options; defaults come from the settings"""

    model_config = ConfigDict(extra="forbid")

    n_rings: int = Field(default_factory=lambda: get_settings().MESH_RINGS, ge=1)
    n_angular: int = Field(default_factory=lambda: get_settings().MESH_ANGULAR, ge=8)
    method: Literal["lbfgs", "gradient-descent"] = Field(
        default_factory=lambda: get_settings().OPTIMIZER_METHOD)
    max_iters: int = Field(default_factory=lambda: get_settings().OPTIMIZER_MAX_ITERS, ge=1)
    smoothing: List[float] = Field(default_factory=lambda: list(get_settings().SMOOTHING_SCHEDULE))
    seed: int = Field(default_factory=lambda: get_settings().DEFAULT_SEED, ge=0, lt=2 ** 64)
    jitter_starts: int = Field(default_factory=lambda: get_settings().JITTER_STARTS, ge=0)
    jitter_scale: float = Field(default_factory=lambda: get_settings().JITTER_SCALE, ge=0)
    use_constructive: bool = True
    optimize: Literal["always", "auto", "never"] = Field(
        "auto", description="'auto' skips the optimizer when a closed form is known")
    tol: float = Field(default_factory=lambda: get_settings().DEFAULT_TOL, gt=0)
    workers: int = Field(default_factory=lambda: get_settings().WORKERS, ge=1)
    strict: bool = Field(False, description="raise NonConvergence instead of flagging it")

    @field_validator("smoothing")
    @classmethod
    def decreasing_positive(cls, v):
        if not v or any(eps <= 0 for eps in v):
            raise ValueError("smoothing schedule must be a non-empty list of positive values")
        return sorted(v, reverse=True)


# ============================================================================
# OBJECTIVE
# ============================================================================

def smoothed_mass(values: np.ndarray, mesh: DiskMesh, eps: float) -> Tuple[float, np.ndarray]:
    """
    Smoothed Jacobian mass and its gradient with respect to all vertex values.

    Returns:
        (objective, gradient of shape (n_vertices, 2))
    """
    tri = mesh.triangles
    area = mesh.triangle_areas
    a, b, c = values[tri[:, 0]], values[tri[:, 1]], values[tri[:, 2]]
    signed = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    det = signed / area
    root = np.sqrt(det * det + eps * eps)
    objective = float(np.sum(area * (root - eps)))

    w = 0.5 * det / root
    grad = np.zeros_like(values)
    np.add.at(grad, tri[:, 0], w[:, None] * np.column_stack([b[:, 1] - c[:, 1], c[:, 0] - b[:, 0]]))
    np.add.at(grad, tri[:, 1], w[:, None] * np.column_stack([c[:, 1] - a[:, 1], a[:, 0] - c[:, 0]]))
    np.add.at(grad, tri[:, 2], w[:, None] * np.column_stack([a[:, 1] - b[:, 1], b[:, 0] - a[:, 0]]))
    return objective, grad


@dataclass
class StartResult:
    label: str
    mass: float
    initial_mass: float
    values: np.ndarray = field(repr=False)
    iterations: int
    converged: bool


def _still_improving(history: List[float]) -> bool:
    """True when the objective still decreased noticeably over the last iterations"""
    if len(history) <= _STALL_WINDOW:
        return False
    old, new = history[-_STALL_WINDOW - 1], history[-1]
    return (old - new) > _STALL_DECREASE * max(abs(old), 1e-300)


def _lbfgs(fun, x0: np.ndarray, max_iters: int) -> Tuple[np.ndarray, int, bool]:
    history: List[float] = []

    def callback(intermediate_result):
        history.append(float(intermediate_result.fun))

    result = minimize(fun, x0, jac=True, method="L-BFGS-B", callback=callback,
                      options={"maxiter": max_iters, "ftol": 1e-14, "gtol": 1e-12})
    hit_limit = result.nit >= max_iters
    return result.x, int(result.nit), not (hit_limit and _still_improving(history))


def _gradient_descent(fun, x0: np.ndarray, max_iters: int) -> Tuple[np.ndarray, int, bool]:
    """Steepest descent with Armijo backtracking"""
    x = x0.copy()
    f, g = fun(x)
    step = 1.0
    history = [f]
    it = 0
    for it in range(1, max_iters + 1):
        gg = float(g @ g)
        if gg <= 1e-24:
            return x, it, True
        while True:
            x_new = x - step * g
            f_new, g_new = fun(x_new)
            if f_new <= f - 1e-4 * step * gg:
                break
            step *= 0.5
            if step < 1e-18:
                return x, it, True
        decrease = (f - f_new) / max(abs(f), 1e-300)
        x, f, g = x_new, f_new, g_new
        history.append(f)
        step *= 2.0
        if decrease < 1e-12:
            return x, it, True
    return x, it, not _still_improving(history)


def _optimize_start(label: str, start: DiscreteMap, options: PlateauOptions,
                    shift: np.ndarray, scale: float) -> StartResult:
    mesh = start.mesh
    interior = mesh.interior_vertices
    base = (np.array(start.values) - shift) / scale
    initial = discrete_jacobian_mass(start)
    if options.optimize == "never":
        return StartResult(label, initial, initial, np.array(start.values), 0, True)

    x = base[interior].ravel()
    total_iters = 0
    converged = True
    for eps in options.smoothing:
        def fun(flat, eps=eps):
            vals = base.copy()
            vals[interior] = flat.reshape(-1, 2)
            f, g = smoothed_mass(vals, mesh, eps)
            return f, g[interior].ravel()

        if options.method == "lbfgs":
            x, nit, converged = _lbfgs(fun, x, options.max_iters)
        else:
            x, nit, converged = _gradient_descent(fun, x, options.max_iters)
        total_iters += nit
        logger.debug(f"start {label}: ε={eps:g} after {nit} iterations")

    vals = base.copy()
    vals[interior] = x.reshape(-1, 2)
    values = vals * scale + shift
    mass = discrete_jacobian_mass(DiscreteMap(mesh, values))
    if mass > initial:
        # smoothing can end in a worse basin than the start itself
        return StartResult(label, initial, initial, np.array(start.values), total_iters, converged)
    return StartResult(label, mass, initial, values, total_iters, converged)


# ============================================================================
# UPPER BOUND
# ============================================================================

@dataclass
class UpperBound:
    """Best discrete competitor found"""
    mass: float
    competitor: DiscreteMap = field(repr=False)
    method: str
    iterations: int = 0
    converged: bool = True
    mesh_stats: Dict[str, int] = field(default_factory=dict)
    candidates: Dict[str, float] = field(default_factory=dict)

    def __iter__(self):
        yield self.mass
        yield self.competitor


BoundaryInput = Union[BoundaryLoop, SampledCircleMap, BoundaryData]


def boundary_nodes(boundary: BoundaryInput, n_angular: int) -> BoundaryData:
    """
    Boundary data at mesh nodes: loops get the constant-speed, vertex-preserving
    parametrization; sampled data keeps its own nodes (refined so that no gap
    exceeds the uniform spacing).
    """
    if isinstance(boundary, BoundaryLoop):
        return loop_boundary_data(boundary, n_angular)
    if isinstance(boundary, SampledCircleMap):
        boundary = BoundaryData.from_circle_map(boundary)
    return boundary.refined(TWO_PI / n_angular)


def starting_maps(data: BoundaryData, mesh: DiskMesh, options: PlateauOptions) -> List[Tuple[str, DiscreteMap]]:
    """Cone, centroid-collapse and seeded jittered starts, in this fixed order"""
    centroid = data.values.mean(axis=0)
    starts = [
        ("cone", cone_extension(data, mesh)),
        ("centroid", cone_extension(data, mesh, apex=centroid)),
    ]
    diameter = float(np.max(np.ptp(data.values, axis=0))) if data.n_nodes else 0.0
    base = starts[1][1]
    interior = mesh.interior_vertices
    for k in range(options.jitter_starts):
        rng = np.random.default_rng([options.seed, k])
        values = np.array(base.values)
        values[interior] += rng.normal(0.0, options.jitter_scale * max(diameter, 1e-12), size=(len(interior), 2))
        starts.append((f"jitter-{k}", DiscreteMap(mesh, values)))
    return starts


def plateau_upper(boundary: BoundaryInput, options: Optional[PlateauOptions] = None) -> UpperBound:
    """
    Discrete upper bound for P(φ).

    Args:
        boundary: loop (parametrized at constant speed), sampled circle map
            or explicit boundary nodes
        options: mesh, optimizer and seed options

    Returns:
        UpperBound: smallest exact Jacobian mass over all final iterates (and
        the constructive competitor when one applies), with its competitor

    Raises:
        NonConvergence: only with options.strict, when the winning start hit
            max_iters while still decreasing
    """
    options = options or PlateauOptions()
    data = boundary_nodes(boundary, options.n_angular)
    mesh = DiskMesh.polar(options.n_rings, angles=data.angles)

    shift = data.values.mean(axis=0)
    scale = float(np.max(np.hypot(*(data.values - shift).T)))
    scale = scale if scale > 0.0 else 1.0

    starts = starting_maps(data, mesh, options)
    if options.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            results = list(pool.map(lambda s: _optimize_start(s[0], s[1], options, shift, scale), starts))
    else:
        results = [_optimize_start(label, start, options, shift, scale) for label, start in starts]

    candidates = {r.label: r.mass for r in results}
    best = min(results, key=lambda r: r.mass)
    improved = best.mass < best.initial_mass - 1e-12
    method = "coneExtension" if best.label == "cone" and not improved else "meshOptimizer"
    upper = UpperBound(best.mass, DiscreteMap(mesh, best.values), method, best.iterations,
                       best.converged, mesh.stats(), candidates)

    if options.use_constructive:
        constructive = bouquet_competitor(data)
        if constructive is not None:
            mass = constructive.jacobian_mass()
            upper.candidates["constructive"] = mass
            if mass < upper.mass:
                upper = UpperBound(mass, constructive, "constructive", upper.iterations, True,
                                   constructive.mesh.stats(), upper.candidates)

    if not upper.converged:
        message = (f"optimizer stopped at max_iters={options.max_iters} with the objective still "
                   f"decreasing (best mass {upper.mass:.12g})")
        if options.strict:
            raise NonConvergence(message)
        logger.warning(message)

    logger.info(
        f"Plateau upper bound {upper.mass:.12g} via {upper.method} on {mesh.n_rings}x{mesh.n_angular} mesh "
        f"({', '.join(f'{k}={v:.6g}' for k, v in upper.candidates.items())})"
    )
    return upper
