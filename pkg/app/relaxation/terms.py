"""
Relaxed Area Terms

The three summands of the relaxed area of a piecewise Lipschitz map:

- the classical area of the graph away from the jump set,
- the area of the affine wall spanned by the two traces of each jump curve,
- the Plateau value of each junction (see app.plateau).

Jump walls are always integrated in the arc-length parameter of the source
curve, which makes straight and curved jump curves the same computation.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, Optional

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import InvalidGeometry
from app.geometry.maps import ConstantMap, area_density
from app.geometry.quadrature import integrate_patches, quadrature_1d, quadrature_2d
from app.geometry.regions import RectanglePatch
from app.scene.curves import JumpCurve
from app.scene.model import Scene

logger = logging.getLogger(__name__)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]


# ============================================================================
# REGULAR PART
# ============================================================================

def regular_term(scene: Scene, tol: Optional[float] = None) -> float:
    """
    ∫_{Ω∖Σ} √(1 + |∇u|² + (det ∇u)²) dx, region by region.

    The tolerance is shared among regions in proportion to their area.
    Constant regions contribute their area exactly.

    Args:
        scene: a valid scene
        tol: absolute error target for the whole term

    Returns:
        float: the classical area away from the jump set
    """
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    areas = [entry.region.area for entry in scene.regions]
    total_area = math.fsum(areas) or 1.0

    parts = []
    for entry, area in zip(scene.regions, areas):
        if isinstance(entry.map, ConstantMap):
            parts.append(area)
            continue
        share = max(tol * area / total_area, 1e-15)
        value = quadrature_2d(entry.region, lambda x, m=entry.map: area_density(m.gradient(x)), share)
        logger.debug(f"Region {entry.id}: graph area {value:.12g} over |Ω_k| = {area:.6g}")
        parts.append(value)
    return math.fsum(parts)


# ============================================================================
# JUMP WALLS
# ============================================================================

def jump_surface_integrand(curve: JumpCurve, t, s) -> np.ndarray:
    """
    Area element of the wall X(t, s) = (t, s·u⁺(t) + (1 − s)·u⁻(t)).

    With d = u⁺ − u⁻ and m_s = s·u̇⁺ + (1 − s)·u̇⁻ this is √(|d|² + (m_s ∧ d)²).
    `t` is the curve parameter in [a, b], `s` in [0, 1]; both broadcast.
    """
    t, s = np.broadcast_arrays(np.atleast_1d(np.asarray(t, dtype=float)),
                               np.atleast_1d(np.asarray(s, dtype=float)))
    t, s = t.ravel(), s.ravel()
    d = curve.jump(t)
    plus, minus = curve.trace_derivatives(t)
    m = s[:, None] * plus + (1.0 - s[:, None]) * minus
    return np.sqrt(np.einsum("mi,mi->m", d, d) + _cross(m, d) ** 2)


def jump_term(curve: JumpCurve, tol: Optional[float] = None) -> float:
    """
    ∫_a^b ∫_0^1 jump_surface_integrand dt ds.

    Tensor Gauss-Legendre cells over [a, b] × [0, 1], split at the trace and
    curve breakpoints so that every cell sees a smooth integrand.

    Raises:
        InvalidGeometry: the curve has no traces
    """
    if not curve.has_traces:
        raise InvalidGeometry(f"curve {curve.id} has no traces")
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    cuts = [curve.a] + [p for p in curve.breakpoints() if curve.a < p < curve.b] + [curve.b]
    patches = [RectanglePatch(t0, 0.0, t1, 1.0) for t0, t1 in zip(cuts[:-1], cuts[1:]) if t1 > t0]
    result = integrate_patches(patches, lambda x: jump_surface_integrand(curve, x[:, 0], x[:, 1]), tol)
    logger.debug(f"Jump wall {curve.id}: {result.value:.12g} ({result.cells} cells)")
    return result.value


def jump_tv(curve: JumpCurve, tol: Optional[float] = None) -> float:
    """∫_a^b |u⁺ − u⁻| dt, the total variation carried by the jump"""
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    return quadrature_1d(lambda t: float(np.hypot(*curve.jump(t)[0])), curve.a, curve.b, tol,
                         points=curve.breakpoints())


def jump_terms(scene: Scene, tol: Optional[float] = None) -> Dict[str, float]:
    """jump_term of every curve, keyed by curve id in scene order"""
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    share = tol / max(1, len(scene.jump_curves))
    return {curve.id: jump_term(curve, share) for curve in scene.jump_curves}
