"""
Winding Numbers

Crossing-number winding of a closed polygonal loop around query points, and
the integral of |w| over the plane by edge-aware quadtree subdivision.

Quadtree cells that contain no loop vertex are crossed only by full chords, so
they are cut exactly along the supporting lines of those chords; on each piece
the winding number is constant. Cells that contain a vertex are subdivided
until their possible error (area times number of crossing edges) fits the
local budget, and contribute a certified bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from app.core.config import get_settings
from app.core.exceptions import InvalidGeometry, PointOnBoundary
from app.geometry.primitives import BoundaryLoop, as_points

logger = logging.getLogger(__name__)

_CHUNK = 20_000


# ============================================================================
# WINDING NUMBER
# ============================================================================

def _raw_winding(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """
    Crossing-number winding of every point (no boundary check).

    An upward edge crossing the horizontal ray to the right of the point
    counts +1, a downward one -1.
    """
    out = np.zeros(len(points), dtype=np.int64)
    if len(starts) == 0:
        return out
    ax, ay = starts[:, 0], starts[:, 1]
    bx, by = ends[:, 0], ends[:, 1]
    for lo in range(0, len(points), _CHUNK):
        px = points[lo:lo + _CHUNK, 0][:, None]
        py = points[lo:lo + _CHUNK, 1][:, None]
        side = (bx - ax) * (py - ay) - (px - ax) * (by - ay)
        up = (ay <= py) & (by > py) & (side > 0)
        down = (ay > py) & (by <= py) & (side < 0)
        out[lo:lo + _CHUNK] = up.sum(axis=1) - down.sum(axis=1)
    return out


def min_edge_distance(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Distance of every point to the nearest loop edge"""
    out = np.empty(len(points))
    d = ends - starts
    dd = np.einsum("ij,ij->i", d, d)
    dd_safe = np.where(dd > 0, dd, 1.0)
    for lo in range(0, len(points), _CHUNK):
        p = points[lo:lo + _CHUNK]
        rel_x = p[:, 0][:, None] - starts[:, 0]
        rel_y = p[:, 1][:, None] - starts[:, 1]
        t = np.clip((rel_x * d[:, 0] + rel_y * d[:, 1]) / dd_safe, 0.0, 1.0)
        t = np.where(dd > 0, t, 0.0)
        out[lo:lo + _CHUNK] = np.hypot(rel_x - t * d[:, 0], rel_y - t * d[:, 1]).min(axis=1)
    return out


def polygon_winding_many(loop: BoundaryLoop, points, edge_tol: Optional[float] = None) -> np.ndarray:
    """
    Winding numbers of a loop around many query points.

    Args:
        loop: closed polygonal loop (repeated traversals count repeatedly)
        points: (m, 2) query points
        edge_tol: minimum admissible distance to any edge (default EDGE_TOL)

    Returns:
        np.ndarray: integer winding numbers, shape (m,)

    Raises:
        PointOnBoundary: if a query point lies within edge_tol of an edge
    """
    tol = get_settings().EDGE_TOL if edge_tol is None else edge_tol
    pts = as_points(points)
    starts, ends = loop.edges()
    dist = min_edge_distance(pts, starts, ends)
    bad = np.flatnonzero(dist < tol)
    if bad.size:
        y = pts[bad[0]]
        raise PointOnBoundary(
            f"point ({y[0]:.12g}, {y[1]:.12g}) is within {tol:g} of the loop "
            f"({bad.size} offending point(s))"
        )
    if loop.n_vertices == 1:
        return np.zeros(len(pts), dtype=np.int64)
    return _raw_winding(pts, starts, ends)


def polygon_winding(loop: BoundaryLoop, y, edge_tol: Optional[float] = None) -> int:
    """Signed number of times the loop winds around y"""
    return int(polygon_winding_many(loop, [y], edge_tol)[0])


# ============================================================================
# CONVEX PIECES
# ============================================================================

def _polygon_area_centroid(poly: np.ndarray) -> Tuple[float, np.ndarray]:
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if abs(area) < 1e-300:
        return 0.0, poly.mean(axis=0)
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return abs(float(area)), np.array([cx, cy])


def _clip_halfplane(poly: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Part of a convex polygon where normal·x >= offset (Sutherland-Hodgman)"""
    vals = poly @ normal - offset
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp >= 0:
            out.append(p)
        if (vp >= 0) != (vq >= 0):
            t = vp / (vp - vq)
            out.append(p + t * (q - p))
    return np.array(out) if len(out) >= 3 else np.empty((0, 2))


def _supporting_lines(starts: np.ndarray, ends: np.ndarray, scale: float) -> List[Tuple[np.ndarray, float]]:
    """Unique (normal, offset) lines through the given edges"""
    lines: List[Tuple[np.ndarray, float]] = []
    tol = 1e-12 * max(scale, 1.0)
    for a, b in zip(starts, ends):
        d = b - a
        length = math.hypot(d[0], d[1])
        normal = np.array([-d[1], d[0]]) / length
        # canonical orientation so reversed edges share a line
        if normal[0] < 0 or (normal[0] == 0 and normal[1] < 0):
            normal = -normal
        offset = float(normal @ a)
        if not any(abs(offset - c) <= tol and abs(1.0 - abs(float(normal @ nn))) <= 1e-14 for nn, c in lines):
            lines.append((normal, offset))
    return lines


# ============================================================================
# QUADTREE INTEGRAL
# ============================================================================

@dataclass(frozen=True)
class WindingAreaBracket:
    """Estimate of ∫|w| with a certified enclosure [lower, upper]"""
    estimate: float
    lower: float
    upper: float
    cells: int

    @property
    def error_bound(self) -> float:
        return max(self.upper - self.estimate, self.estimate - self.lower)


def _box_hits(starts: np.ndarray, ends: np.ndarray, box: Tuple[float, float, float, float],
              slack: float) -> np.ndarray:
    """Mask of segments meeting the closed box (Liang-Barsky, vectorized)"""
    x0, y0, x1, y1 = box[0] - slack, box[1] - slack, box[2] + slack, box[3] + slack
    d = ends - starts
    t0 = np.zeros(len(starts))
    t1 = np.ones(len(starts))
    ok = np.ones(len(starts), dtype=bool)
    for p, q in (
        (-d[:, 0], starts[:, 0] - x0),
        (d[:, 0], x1 - starts[:, 0]),
        (-d[:, 1], starts[:, 1] - y0),
        (d[:, 1], y1 - starts[:, 1]),
    ):
        parallel = p == 0
        ok &= ~(parallel & (q < 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = q / p
        entering = (~parallel) & (p < 0)
        leaving = (~parallel) & (p > 0)
        t0 = np.where(entering, np.maximum(t0, r), t0)
        t1 = np.where(leaving, np.minimum(t1, r), t1)
    return ok & (t0 <= t1)


def winding_area_bracket(loop: BoundaryLoop, tol: Optional[float] = None) -> WindingAreaBracket:
    """
    ∫_{ℝ²}|w(y)| dy with a certified bracket.

    Args:
        loop: closed polygonal loop
        tol: absolute error target (> 0); default DEFAULT_TOL

    Returns:
        WindingAreaBracket: estimate within tol of the integral, lower <= integral <= upper
    """
    settings = get_settings()
    tol = settings.DEFAULT_TOL if tol is None else tol
    if tol <= 0:
        raise InvalidGeometry("tol must be positive")

    if loop.is_degenerate:
        return WindingAreaBracket(0.0, 0.0, 0.0, 0)

    starts, ends = loop.edges()
    bx0, by0, bx1, by1 = loop.bbox()
    if bx1 - bx0 <= 0.0 or by1 - by0 <= 0.0:
        return WindingAreaBracket(0.0, 0.0, 0.0, 0)

    scale = max(bx1 - bx0, by1 - by0)
    slack = 1e-12 * scale
    eps_cell = tol / (4.0 * loop.n_vertices + 1.0)
    max_depth = settings.MAX_QUADTREE_DEPTH

    exact_area: List[float] = []
    exact_points: List[np.ndarray] = []
    leaf_area: List[float] = []
    leaf_points: List[np.ndarray] = []
    leaf_k: List[int] = []
    cells = 0

    stack = [((bx0, by0, bx1, by1), np.arange(len(starts)), 0)]
    while stack:
        box, candidates, depth = stack.pop()
        cells += 1
        hits = candidates[_box_hits(starts[candidates], ends[candidates], box, slack)]
        x0, y0, x1, y1 = box
        area = (x1 - x0) * (y1 - y0)
        centre = np.array([(x0 + x1) / 2.0, (y0 + y1) / 2.0])

        if hits.size == 0:
            exact_area.append(area)
            exact_points.append(centre)
            continue

        verts = starts[hits]
        has_vertex = bool(np.any(
            (verts[:, 0] >= x0 - slack) & (verts[:, 0] <= x1 + slack)
            & (verts[:, 1] >= y0 - slack) & (verts[:, 1] <= y1 + slack)
        )) or bool(np.any(
            (ends[hits][:, 0] >= x0 - slack) & (ends[hits][:, 0] <= x1 + slack)
            & (ends[hits][:, 1] >= y0 - slack) & (ends[hits][:, 1] <= y1 + slack)
        ))

        if not has_vertex:
            pieces = [np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])]
            for normal, offset in _supporting_lines(starts[hits], ends[hits], scale):
                split = []
                for piece in pieces:
                    for sign in (1.0, -1.0):
                        part = _clip_halfplane(piece, sign * normal, sign * offset)
                        if len(part):
                            split.append(part)
                pieces = split
            for piece in pieces:
                piece_area, centroid = _polygon_area_centroid(piece)
                if piece_area > 0.0:
                    exact_area.append(piece_area)
                    exact_points.append(centroid)
            continue

        if area * hits.size <= eps_cell or depth >= max_depth:
            leaf_area.append(area)
            leaf_points.append(centre)
            leaf_k.append(int(hits.size))
            continue

        xm, ym = centre
        for child in ((xm, ym, x1, y1), (x0, ym, xm, y1), (x0, y0, xm, ym), (xm, y0, x1, ym)):
            stack.append((child, hits, depth + 1))

    w_exact = np.abs(_raw_winding(np.array(exact_points).reshape(-1, 2), starts, ends))
    exact_terms = [a * w for a, w in zip(exact_area, w_exact)]
    exact_sum = math.fsum(exact_terms)

    if leaf_area:
        w_leaf = np.abs(_raw_winding(np.array(leaf_points), starts, ends))
        k = np.array(leaf_k)
        la = np.array(leaf_area)
        est_leaf = math.fsum(la * w_leaf)
        low_leaf = math.fsum(la * np.maximum(0, w_leaf - k))
        up_leaf = math.fsum(la * (w_leaf + k))
    else:
        est_leaf = low_leaf = up_leaf = 0.0

    bracket = WindingAreaBracket(
        estimate=exact_sum + est_leaf,
        lower=exact_sum + low_leaf,
        upper=exact_sum + up_leaf,
        cells=cells,
    )
    if bracket.error_bound > tol:
        logger.warning(
            f"Winding integral error bound {bracket.error_bound:.3g} exceeds tol {tol:.3g} "
            f"(depth limit {max_depth} reached)"
        )
    logger.debug(
        f"Winding integral: estimate={bracket.estimate:.12g} "
        f"bracket=[{bracket.lower:.12g}, {bracket.upper:.12g}] cells={cells}"
    )
    return bracket


def winding_area_integral(loop: BoundaryLoop, tol: Optional[float] = None) -> float:
    """∫|w(y)| dy to absolute error tol; 0 for degenerate loops"""
    return winding_area_bracket(loop, tol).estimate
