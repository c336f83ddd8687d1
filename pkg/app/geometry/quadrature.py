"""
Adaptive Quadrature

Deterministic global-adaptive tensor Gauss-Legendre integration over unit-square
patches (2D) and scipy adaptive quadrature (1D).

Each cell is integrated with a 5×5 and a 3×3 rule; the difference is the
cell's error estimate. The worst cells are split into four until the summed
estimate meets the tolerance. Cells are processed in a fixed order and the
final sum uses math.fsum, so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
import heapq
import itertools
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from app.core.config import get_settings
from app.core.exceptions import InvalidGeometry, NonFiniteIntegrand
from app.geometry.regions import Patch, RegionSpec

logger = logging.getLogger(__name__)

ScalarField = Callable[[np.ndarray], np.ndarray]


def _unit_rule(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    uu, vv = np.meshgrid(x, x, indexing="ij")
    ww = np.outer(w, w)
    return uu.ravel(), vv.ravel(), ww.ravel()


_HIGH = _unit_rule(5)
_LOW = _unit_rule(3)
_NODES_PER_CELL = len(_HIGH[0]) + len(_LOW[0])


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    cells: int
    converged: bool


def _evaluate_cells(patches: Sequence[Patch], cells: List[Tuple[int, float, float, float, float]],
                    f: ScalarField) -> Tuple[np.ndarray, np.ndarray]:
    """High-order values and error estimates for a batch of cells"""
    us, vs, owners = [], [], []
    for pid, u0, u1, v0, v1 in cells:
        du, dv = u1 - u0, v1 - v0
        us.append(u0 + du * np.concatenate([_HIGH[0], _LOW[0]]))
        vs.append(v0 + dv * np.concatenate([_HIGH[1], _LOW[1]]))
        owners.append(pid)

    points_all, jac_all = [], []
    for pid, u, v in zip(owners, us, vs):
        pts, jac = patches[pid].map(u, v)
        points_all.append(pts)
        jac_all.append(jac)
    points = np.vstack(points_all)
    jac = np.concatenate(jac_all)

    values = np.asarray(f(points), dtype=float).reshape(-1)
    if values.shape[0] != points.shape[0]:
        raise InvalidGeometry("integrand must return one value per point")
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteIntegrand(
            f"integrand is not finite at ({points[bad, 0]:.12g}, {points[bad, 1]:.12g})"
        )

    integrand = (values * jac).reshape(len(cells), _NODES_PER_CELL)
    scale = np.array([(u1 - u0) * (v1 - v0) for _, u0, u1, v0, v1 in cells])
    n_high = len(_HIGH[0])
    high = integrand[:, :n_high] @ _HIGH[2] * scale
    low = integrand[:, n_high:] @ _LOW[2] * scale
    return high, np.abs(high - low)


def integrate_patches(patches: Sequence[Patch], f: ScalarField, tol: float,
                      max_cells: Optional[int] = None) -> QuadratureResult:
    """
    Integrate a vectorized scalar field over a union of patches.

    Args:
        patches: unit-square parametrizations with disjoint images
        f: maps (m, 2) points to (m,) values
        tol: absolute error target
        max_cells: safeguard on the number of live cells (default MAX_QUADRATURE_CELLS)

    Returns:
        QuadratureResult: value, estimated error, number of cells, convergence flag
    """
    if tol <= 0:
        raise InvalidGeometry("quadrature tolerance must be positive")
    if not patches:
        return QuadratureResult(0.0, 0.0, 0, True)
    max_cells = max_cells or get_settings().MAX_QUADRATURE_CELLS

    counter = itertools.count()
    roots = [(pid, 0.0, 1.0, 0.0, 1.0) for pid in range(len(patches))]
    values, errors = _evaluate_cells(patches, roots, f)

    # heap of (-error, order, cell, value); ``settled`` keeps cells below float noise
    heap = []
    for cell, val, err in zip(roots, values, errors):
        heapq.heappush(heap, (-float(err), next(counter), cell, float(val)))
    total_err = math.fsum(float(e) for e in errors)

    while total_err > tol and len(heap) < max_cells:
        batch = []
        n_pop = min(len(heap), max(1, min(256, len(heap) // 8)))
        for _ in range(n_pop):
            neg_err, _, cell, val = heapq.heappop(heap)
            batch.append(cell)
        children = []
        for pid, u0, u1, v0, v1 in batch:
            um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
            children.extend([
                (pid, u0, um, v0, vm), (pid, um, u1, v0, vm),
                (pid, u0, um, vm, v1), (pid, um, u1, vm, v1),
            ])
        c_values, c_errors = _evaluate_cells(patches, children, f)
        for cell, val, err in zip(children, c_values, c_errors):
            heapq.heappush(heap, (-float(err), next(counter), cell, float(val)))
        total_err = math.fsum(-item[0] for item in heap)

    converged = total_err <= tol
    if not converged:
        logger.warning(
            f"Quadrature stopped at {len(heap)} cells with error estimate {total_err:.3g} > tol {tol:.3g}"
        )

    # fixed summation order: by creation index
    ordered = sorted(heap, key=lambda item: item[1])
    value = math.fsum(item[3] for item in ordered)
    return QuadratureResult(value=value, error=total_err, cells=len(heap), converged=converged)


def patch_nodes(region: Union[RegionSpec, Sequence[Patch]], n: int = 6) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss nodes (m, 2) over every patch and their area weights (m,); all nodes are interior"""
    u, v, w = _unit_rule(n)
    patches = region.patches() if isinstance(region, RegionSpec) else list(region)
    if not patches:
        return np.empty((0, 2)), np.empty(0)
    mapped = [patch.map(u, v) for patch in patches]
    return np.vstack([pts for pts, _ in mapped]), np.concatenate([w * factor for _, factor in mapped])


def quadrature_2d(region: Union[RegionSpec, Sequence[Patch]], f: ScalarField,
                  tol: Optional[float] = None) -> float:
    """
    ∫_region f dx by adaptive subdivision.

    Args:
        region: a RegionSpec, or a list of patches
        f: vectorized scalar field
        tol: absolute error target (default DEFAULT_TOL)

    Returns:
        float: the integral

    Raises:
        NonFiniteIntegrand: f returned NaN or infinity
    """
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    patches = region.patches() if isinstance(region, RegionSpec) else list(region)
    return integrate_patches(patches, f, tol).value


def quadrature_1d(f: Callable[[float], float], a: float, b: float, tol: Optional[float] = None,
                  points: Optional[Sequence[float]] = None) -> float:
    """
    ∫_a^b f(t) dt with scipy's adaptive QUADPACK routine.

    Args:
        f: scalar function
        a, b: interval ends
        tol: absolute error target (default DEFAULT_TOL)
        points: known break points inside (a, b)

    Returns:
        float: the integral
    """
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    if b <= a:
        return 0.0

    def checked(t: float) -> float:
        value = float(f(t))
        if not math.isfinite(value):
            raise NonFiniteIntegrand(f"integrand is not finite at t={t:.12g}")
        return value

    inner = None
    if points is not None:
        inner = [p for p in points if a < p < b] or None
    value, err = integrate.quad(checked, a, b, epsabs=tol, epsrel=0.0, limit=400, points=inner)
    if err > tol:
        logger.warning(f"1D quadrature error estimate {err:.3g} exceeds tol {tol:.3g}")
    return float(value)
