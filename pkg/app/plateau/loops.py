"""
Boundary Loops for the Plateau Problem

γ ↦ γ̃ for piecewise constant circle data, vertex snapping, and the
constant-speed boundary parametrization used by the mesh optimizer.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from app.core.config import get_settings
from app.geometry.primitives import TWO_PI, BoundaryLoop, PiecewiseConstantCircleMap
from app.plateau.mesh import BoundaryData

logger = logging.getLogger(__name__)


def tilde_gamma(gamma: PiecewiseConstantCircleMap) -> BoundaryLoop:
    """
    Closed polygon through the circle values in order.

    Its edges are the jump segments; repeated consecutive values (including
    last/first) collapse, so constant data gives a single-point loop.
    """
    loop = BoundaryLoop(np.asarray(gamma.values, dtype=float))
    logger.debug("γ̃: %d values -> %d vertices %s, length %.12g", gamma.n_values, loop.n_vertices, loop.vertices,
                 loop.length)
    return loop


def snap_vertices(vertices: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Replace every vertex within tol of an earlier one by that earlier vertex"""
    tol = get_settings().SNAP_TOL if tol is None else tol
    out = np.array(vertices, dtype=float).reshape(-1, 2)
    for i in range(1, len(out)):
        dist = np.hypot(*(out[:i] - out[i]).T)
        k = int(np.argmin(dist))
        if dist[k] <= tol:
            out[i] = out[k]
    return out


def loop_boundary_data(loop: BoundaryLoop, n_angular: int) -> BoundaryData:
    """
    Constant-speed parametrization of the loop over ∂B₁ at n_angular uniform
    nodes, with every loop vertex inserted as a node of its own so the
    boundary polygon is the loop exactly. Uniform nodes closer than half a
    spacing to a vertex node are dropped.
    """
    spacing = TWO_PI / n_angular
    uniform = np.arange(n_angular) * spacing
    if loop.n_vertices < 2:
        return BoundaryData(uniform, np.repeat(loop.vertices, n_angular, axis=0))

    vertex_angles = TWO_PI * loop.vertex_fractions()
    ext = np.concatenate([vertex_angles - TWO_PI, vertex_angles, vertex_angles + TWO_PI])
    nearest = np.min(np.abs(uniform[:, None] - ext[None, :]), axis=1)
    keep = uniform[nearest >= 0.5 * spacing]

    angles = np.concatenate([vertex_angles, keep])
    order = np.argsort(angles, kind="stable")
    angles = angles[order]
    fractions = angles / TWO_PI
    values = loop.point_at_fraction(fractions)
    # exact vertex values, free of interpolation round-off
    is_vertex = order < len(vertex_angles)
    values[is_vertex] = loop.vertices[order[is_vertex]]
    data = BoundaryData(angles, values)
    if data.gaps().max() > spacing:
        data = data.refined(spacing)
    return data
