"""
Closed Forms for Recognized Loops

Exact Plateau values for loop classes where the answer is known:

- a simple (Jordan) polygon: its enclosed area;
- a word in the petals of a bouquet (simple polygons meeting pairwise only
  at one shared vertex), after free cancellation:
    * empty word: 0;
    * one petal traversed d times with coherent orientation: |d|·area
      (this covers d-fold traversals of a simple polygon);
    * two petals, a^m b^n: |m|·|A| + |n|·|B|;
    * a commutator a b a⁻¹ b⁻¹: 2·min(|A|, |B|).

Anything else is reported as unrecognized and only bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from matplotlib.path import Path

from app.geometry.primitives import BoundaryLoop
from app.plateau.loops import snap_vertices

logger = logging.getLogger(__name__)

_COLLINEAR_TOL = 1e-12


# ============================================================================
# POLYGON PREDICATES
# ============================================================================

def _orient(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])


def _segments_meet(p1, p2, q1, q2) -> np.ndarray:
    """Closed segments p1p2 and q1q2 share a point (vectorized over the q side)"""
    scale = max(1.0, float(np.max(np.abs(np.vstack([p1, p2])))))
    eps = _COLLINEAR_TOL * scale * scale
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    proper = (((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))) & \
             (((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps)))

    def on_segment(a, b, c, d):
        lo = np.minimum(a, b) - eps
        hi = np.maximum(a, b) + eps
        return (np.abs(d) <= eps) & np.all((lo <= c) & (c <= hi), axis=-1)

    p1b = np.broadcast_to(p1, q1.shape)
    p2b = np.broadcast_to(p2, q1.shape)
    touch = on_segment(q1, q2, p1b, d1) | on_segment(q1, q2, p2b, d2) | \
        on_segment(p1b, p2b, q1, d3) | on_segment(p1b, p2b, q2, d4)
    return proper | touch


def drop_collinear(vertices: np.ndarray, keep_first: bool = False) -> np.ndarray:
    """Remove vertices in the middle of straight runs (cyclically); spikes are kept"""
    pts = np.asarray(vertices, dtype=float)
    changed = True
    while changed and len(pts) > 3:
        changed = False
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        scale = max(1.0, float(np.max(np.abs(pts))))
        straight = np.abs(_orient(prev, pts, nxt)) <= _COLLINEAR_TOL * scale * scale
        forward = np.einsum("ij,ij->i", pts - prev, nxt - pts) > 0
        if keep_first:
            straight[0] = False
        idx = np.flatnonzero(straight & forward)
        if idx.size:
            pts = np.delete(pts, idx[0], axis=0)
            changed = True
    return pts


def is_simple_polygon(vertices: np.ndarray) -> bool:
    """No two non-adjacent edges meet and adjacent edges only share their endpoint"""
    pts = drop_collinear(np.asarray(vertices, dtype=float))
    n = len(pts)
    if n < 3:
        return False
    if len({(float(x), float(y)) for x, y in pts}) != n:
        return False
    starts, ends = pts, np.roll(pts, -1, axis=0)
    for i in range(n):
        others = [k for k in range(n) if k != i and k != (i + 1) % n and k != (i - 1) % n]
        if others and np.any(_segments_meet(starts[i], ends[i], starts[others], ends[others])):
            return False
        # adjacent edge folding back onto this one
        k = (i + 1) % n
        turn = _orient(starts[i], ends[i], ends[k])
        scale = max(1.0, float(np.max(np.abs(pts))))
        if abs(turn) <= _COLLINEAR_TOL * scale * scale and np.dot(ends[i] - starts[i], ends[k] - starts[k]) < 0:
            return False
    return True


def _polygons_touch_only_at(a: np.ndarray, b: np.ndarray, shared: np.ndarray) -> bool:
    """Boundaries of two polygons meet only at the shared vertex, and neither contains the other"""
    tol = 1e-12 * max(1.0, float(np.max(np.abs(np.vstack([a, b])))))
    a_s, a_e = a, np.roll(a, -1, axis=0)
    b_s, b_e = b, np.roll(b, -1, axis=0)
    for i in range(len(a)):
        hits = np.flatnonzero(_segments_meet(a_s[i], a_e[i], b_s, b_e))
        for k in hits:
            if not (_touches_only_at(a_s[i], a_e[i], b_s[k], b_e[k], shared, tol)):
                return False
    off_a = a[np.hypot(*(a - shared).T) > tol]
    off_b = b[np.hypot(*(b - shared).T) > tol]
    if np.any(Path(b).contains_points(off_a)) or np.any(Path(a).contains_points(off_b)):
        return False
    return True


def _touches_only_at(p1, p2, q1, q2, shared, tol) -> bool:
    p_has = min(np.hypot(*(p1 - shared)), np.hypot(*(p2 - shared))) <= tol
    q_has = min(np.hypot(*(q1 - shared)), np.hypot(*(q2 - shared))) <= tol
    if not (p_has and q_has):
        return False
    # both segments leave the shared vertex: they must not overlap along a common direction
    dp = (p2 - p1) if np.hypot(*(p1 - shared)) <= tol else (p1 - p2)
    dq = (q2 - q1) if np.hypot(*(q1 - shared)) <= tol else (q1 - q2)
    cross = dp[0] * dq[1] - dp[1] * dq[0]
    return not (abs(cross) <= tol * max(1.0, np.hypot(*dp) * np.hypot(*dq)) and np.dot(dp, dq) > 0)


def polygon_area(vertices: np.ndarray) -> float:
    x, y = np.asarray(vertices, dtype=float).T
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


# ============================================================================
# BOUQUET WORDS
# ============================================================================

@dataclass
class LoopStructure:
    """
    How a loop decomposes at a shared vertex.

    `word` is the reduced cyclic word as (petal index, ±1) letters; `petals`
    holds each distinct petal as a canonical vertex array starting at the
    shared vertex, oriented as first traversed. `occurrences` are the
    positions of the shared vertex in the snapped vertex sequence.
    """
    kind: str
    value: float
    shared: Optional[np.ndarray] = None
    petals: List[np.ndarray] = field(default_factory=list)
    word: List[Tuple[int, int]] = field(default_factory=list)
    raw_word: List[Tuple[int, int]] = field(default_factory=list)
    occurrences: List[int] = field(default_factory=list)
    vertices: Optional[np.ndarray] = None


def _key(points: np.ndarray) -> Tuple[Tuple[float, float], ...]:
    return tuple((float(x), float(y)) for x, y in points)


def _reduce_cyclic(word: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    stack: List[Tuple[int, int]] = []
    for letter in word:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    while len(stack) >= 2 and stack[0][0] == stack[-1][0] and stack[0][1] == -stack[-1][1]:
        stack = stack[1:-1]
    return stack


def _split_petals(verts: np.ndarray, shared: np.ndarray):
    """Cut the cyclic vertex sequence at every visit of `shared`"""
    hits = [i for i in range(len(verts)) if np.array_equal(verts[i], shared)]
    petals = []
    for k, start in enumerate(hits):
        stop = hits[(k + 1) % len(hits)]
        if stop <= start:
            stop += len(verts)
        idx = [(start + m) % len(verts) for m in range(stop - start)]
        petals.append(verts[idx])
    return hits, petals


def _classify_word(word, areas) -> Tuple[Optional[str], float]:
    if not word:
        return "contractible", 0.0
    letters = {p for p, _ in word}
    if len(letters) == 1:
        signs = {s for _, s in word}
        if len(signs) == 1:
            return "power", len(word) * abs(areas[word[0][0]])
        return None, float("nan")
    if len(word) == 4:
        (p0, s0), (p1, s1), (p2, s2), (p3, s3) = word
        if p0 == p2 and p1 == p3 and p0 != p1 and s0 == -s2 and s1 == -s3:
            return "commutator", 2.0 * min(abs(areas[p0]), abs(areas[p1]))
    if len(letters) == 2:
        # a^m b^n: each petal appears in one block of coherent letters
        blocks = []
        for letter in word:
            if blocks and blocks[-1][0] == letter:
                blocks[-1][1] += 1
            else:
                blocks.append([letter, 1])
        if len(blocks) > 2 and blocks[0][0] == blocks[-1][0]:
            blocks[0][1] += blocks.pop()[1]
        if len(blocks) == 2:
            return "power-pair", sum(count * abs(areas[letter[0]]) for letter, count in blocks)
    return None, float("nan")


def analyze_loop(loop: BoundaryLoop, snap_tol: Optional[float] = None) -> Optional[LoopStructure]:
    """
    Recognize the loop's class.

    Returns:
        LoopStructure with the exact Plateau value, or None when unrecognized
    """
    verts = BoundaryLoop(snap_vertices(loop.vertices, snap_tol)).vertices
    n = len(verts)
    if n < 3:
        return LoopStructure("degenerate", 0.0, vertices=verts)

    counts: Dict[Tuple[float, float], int] = {}
    for p in _key(verts):
        counts[p] = counts.get(p, 0) + 1
    if max(counts.values()) == 1:
        if is_simple_polygon(verts):
            return LoopStructure("jordan", abs(polygon_area(verts)), vertices=verts)
        return None

    # shared vertex: the most visited one (first in loop order on ties)
    best = max(counts.values())
    shared = next(np.array(p) for p in _key(verts) if counts[p] == best)
    hits, raw_petals = _split_petals(verts, shared)

    petals: List[np.ndarray] = []
    keys: Dict[Tuple, Tuple[int, int]] = {}
    raw_word: List[Tuple[int, int]] = []
    for petal in raw_petals:
        canon = drop_collinear(petal, keep_first=True)
        if len(canon) < 3 or abs(polygon_area(canon)) <= 1e-15:
            # whisker or flat petal: retracts along itself at no cost
            if len(canon) >= 3 and not np.allclose(_orient(canon[0], canon[1], canon[2:]), 0.0):
                return None
            raw_word.append((-1, 1))
            continue
        key = _key(canon)
        rev = _key(np.vstack([canon[:1], canon[1:][::-1]]))
        if key in keys:
            raw_word.append(keys[key])
        elif rev in keys:
            idx, sign = keys[rev]
            raw_word.append((idx, -sign))
        else:
            if not is_simple_polygon(canon):
                return None
            keys[key] = (len(petals), 1)
            petals.append(canon)
            raw_word.append((len(petals) - 1, 1))

    for i in range(len(petals)):
        for k in range(i + 1, len(petals)):
            if not _polygons_touch_only_at(petals[i], petals[k], shared):
                return None

    areas = [polygon_area(p) for p in petals]
    # orientation of a letter: sign of the traversal relative to positive area
    word = [(p, s * (1 if areas[p] > 0 else -1)) for p, s in raw_word if p >= 0]
    reduced = _reduce_cyclic(word)
    kind, value = _classify_word(reduced, areas)
    if kind is None:
        return None
    return LoopStructure(kind, float(value), shared=shared, petals=petals, word=reduced,
                         raw_word=raw_word, occurrences=hits, vertices=verts)


def plateau_closed_form(loop: BoundaryLoop) -> Optional[float]:
    """Exact P(loop) for recognized classes, None otherwise"""
    structure = analyze_loop(loop)
    if structure is None:
        logger.debug("Loop with %d vertices not recognized: %s", loop.n_vertices, loop.vertices)
        return None
    logger.debug(f"Loop recognized as {structure.kind}: P = {structure.value:.12g}")
    return structure.value
