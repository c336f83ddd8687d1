"""
Constructive Competitors

Explicit discrete competitors whose Jacobian mass certifies an upper bound
without relying on the optimizer.

Commutator bouquet p q p⁻¹ q⁻¹ (p the smaller petal, both based at O):

1. outer annulus: shrink both p-arcs to O by the cone from O; this sweeps
   p twice and costs 2|P| (exactly, when p is star-shaped from O);
2. inner rings: retract the loop O·q·O·q⁻¹ vertex by vertex along q. Every
   quad of this phase has collinear images, so it costs nothing.
"""

from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np

from app.core.config import get_settings
from app.geometry.primitives import BoundaryLoop
from app.plateau.closed_form import analyze_loop, drop_collinear, polygon_area
from app.plateau.loops import snap_vertices
from app.plateau.mesh import BoundaryData, DiscreteMap, DiskMesh

logger = logging.getLogger(__name__)


def _collapse_index(values: np.ndarray) -> np.ndarray:
    """Index of each node in the loop with consecutive duplicates removed (cyclically)"""
    idx = np.zeros(len(values), dtype=int)
    for i in range(1, len(values)):
        idx[i] = idx[i - 1] + (0 if np.array_equal(values[i], values[i - 1]) else 1)
    tail = np.array_equal(values[-1], values[0])
    if tail:
        k = len(values) - 1
        last = idx[k]
        while k > 0 and idx[k] == last:
            idx[k] = 0
            k -= 1
    return idx


def _path_positions(points: np.ndarray, path: np.ndarray, tol: float) -> np.ndarray:
    """Fractional vertex positions of points walked in order along a polyline"""
    out = np.empty(len(points))
    edge = 0
    last = len(path) - 2
    for n, x in enumerate(points):
        while edge < last:
            a, b = path[edge], path[edge + 1]
            ab = b - a
            t = float(np.clip(np.dot(x - a, ab) / np.dot(ab, ab), 0.0, 1.0))
            if np.hypot(*(a + t * ab - x)) <= tol:
                break
            edge += 1
        a, b = path[edge], path[edge + 1]
        ab = b - a
        out[n] = edge + float(np.clip(np.dot(x - a, ab) / np.dot(ab, ab), 0.0, 1.0))
    return out


def _along(path: np.ndarray, pos: np.ndarray) -> np.ndarray:
    pos = np.clip(pos, 0.0, len(path) - 1)
    base = np.minimum(np.floor(pos).astype(int), len(path) - 2)
    frac = (pos - base)[:, None]
    return path[base] + frac * (path[base + 1] - path[base])


def bouquet_competitor(boundary: BoundaryData) -> Optional[DiscreteMap]:
    """
    Explicit competitor for commutator boundary data.

    Args:
        boundary: boundary nodes whose values trace the loop (every loop
            vertex must be a node; nodes in between lie on the edges)

    Returns:
        DiscreteMap with the given boundary, or None if the data is not a
        two-petal commutator
    """
    settings = get_settings()
    values = np.asarray(boundary.values, dtype=float)
    snapped = snap_vertices(values, settings.SNAP_TOL)
    structure = analyze_loop(BoundaryLoop(snapped), settings.SNAP_TOL)
    if structure is None or structure.kind != "commutator":
        return None
    if len(structure.raw_word) != 4 or any(p < 0 for p, _ in structure.raw_word):
        logger.debug("Commutator with whiskers: no constructive competitor")
        return None

    verts = structure.vertices
    hits = structure.occurrences
    shared = structure.shared
    areas = [abs(polygon_area(p)) for p in structure.petals]
    small = int(np.argmin(areas))
    first = next(k for k, (p, _) in enumerate(structure.raw_word) if p == small)
    kinds = {(first + m) % 4: kind for m, kind in enumerate(("p", "q", "p_inv", "q_inv"))}

    node_pos = _collapse_index(snapped)
    if node_pos.max() != len(verts) - 1:
        return None
    arc = np.empty(len(values), dtype=object)
    for k in range(4):
        start, stop = hits[k], hits[(k + 1) % 4]
        inside = (node_pos >= start) & (node_pos < stop) if stop > start else (node_pos >= start) | (node_pos < stop)
        arc[inside] = kinds[k]

    # q as a closed path O = b_0, b_1, ..., b_m, b_{m+1} = O in the q-arc direction
    q_arc = next(k for k in range(4) if kinds[k] == "q")
    start, stop = hits[q_arc], hits[(q_arc + 1) % 4]
    span = [(start + m) % len(verts) for m in range((stop - start) % len(verts))]
    q_path = np.vstack([drop_collinear(verts[span], keep_first=True), shared[None, :]])
    m_plus_1 = len(q_path) - 1
    tol = 1e-9 * max(1.0, float(np.max(np.abs(q_path))))

    pos = np.zeros(len(values))
    q_nodes = np.flatnonzero(arc == "q")
    pos[q_nodes] = _path_positions(snapped[q_nodes], q_path, tol)
    qi_nodes = np.flatnonzero(arc == "q_inv")
    pos[qi_nodes] = m_plus_1 - _path_positions(snapped[qi_nodes], q_path[::-1], tol)

    levels: List[np.ndarray] = []
    for level in range(m_plus_1 + 1):
        ring = np.empty_like(values)
        ring[arc == "p"] = shared
        ring[arc == "p_inv"] = q_path[level]
        on_q = (arc == "q") | (arc == "q_inv")
        ring[on_q] = _along(q_path, np.minimum(pos[on_q], level))
        levels.append(ring)

    radii = np.append(np.arange(1, m_plus_1 + 2) / (m_plus_1 + 2), 1.0)
    mesh = DiskMesh(radii, boundary.angles)
    competitor = DiscreteMap(mesh, np.vstack([shared[None, :]] + levels + [values]))
    logger.info(
        f"Constructive bouquet competitor: petals |P|={areas[small]:.6g}, |Q|={areas[1 - small]:.6g}, "
        f"mass={competitor.jacobian_mass():.12g}"
    )
    return competitor
