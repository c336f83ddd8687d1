"""
SVG Plot Service

Static pictures for reports: scene partitions, γ̃ loops with their winding
numbers, and convergence curves. Figures are drawn with the Agg backend and
saved with a fixed hash salt and no date, so reruns give identical files.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from app.core.config import get_settings  # noqa: E402
from app.geometry.primitives import BoundaryLoop  # noqa: E402
from app.geometry.winding import polygon_winding_many  # noqa: E402
from app.recovery.checks import GAP_COLUMNS, ConvergenceReport  # noqa: E402
from app.scene.model import Scene  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    plt.rcParams["svg.hashsalt"] = get_settings().SVG_HASH_SALT
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    except OSError as e:
        logger.error(f"Could not write {path}: {e}")
        raise
    finally:
        plt.close(fig)
    logger.info(f"Wrote figure {path}")
    return path


# ============================================================================
# SCENES
# ============================================================================

def plot_scene(scene: Scene, path: PathLike, samples: int = 256) -> Path:
    """Regions filled by index, jump curves in black, junctions as dots"""
    fig, ax = plt.subplots(figsize=(5, 5))
    cmap = plt.get_cmap("tab10")
    for k, entry in enumerate(scene.regions):
        for part in getattr(entry.region, "parts", (entry.region,)):
            outline = part.boundary_samples(samples)
            ax.add_patch(Polygon(outline, closed=True, facecolor=cmap(k % 10), alpha=0.45,
                                 edgecolor="none", label=entry.id if part is entry.region else None))
    for curve in scene.jump_curves:
        line = curve.alpha.polyline()
        ax.plot(line[:, 0], line[:, 1], color="black", linewidth=1.2)
    if scene.junctions:
        points = np.array([j.point for j in scene.junctions])
        ax.scatter(points[:, 0], points[:, 1], color="crimson", s=14, zorder=3)

    outline = scene.domain.boundary_samples(samples)
    ax.plot(outline[:, 0], outline[:, 1], color="grey", linewidth=0.8)
    ax.set_aspect("equal")
    ax.set_title(scene.name)
    if len(scene.regions) <= 10:
        ax.legend(loc="upper right", fontsize="x-small")
    return _save(fig, path)


# ============================================================================
# LOOPS
# ============================================================================

def plot_loop(loop: BoundaryLoop, path: PathLike, resolution: int = 200, title: Optional[str] = None) -> Path:
    """The loop over a heatmap of its winding number"""
    verts = loop.closed_samples()
    xmin, ymin, xmax, ymax = loop.bbox()
    pad = 0.1 * max(xmax - xmin, ymax - ymin, 1e-12)
    xs = np.linspace(xmin - pad, xmax + pad, resolution)
    ys = np.linspace(ymin - pad, ymax + pad, resolution)
    gx, gy = np.meshgrid(xs, ys)
    # grid points that land on the loop are not rejected
    winding = polygon_winding_many(loop, np.column_stack([gx.ravel(), gy.ravel()]), edge_tol=0.0)

    fig, ax = plt.subplots(figsize=(5, 5))
    mesh = ax.pcolormesh(gx, gy, winding.reshape(gx.shape), cmap="RdBu_r", shading="auto")
    fig.colorbar(mesh, ax=ax, label="winding number")
    ax.plot(verts[:, 0], verts[:, 1], color="black", linewidth=1.0)
    ax.scatter(loop.vertices[:, 0], loop.vertices[:, 1], color="black", s=8)
    ax.set_aspect("equal")
    ax.set_title(title or f"loop with {loop.n_vertices} vertices")
    return _save(fig, path)


# ============================================================================
# CONVERGENCE
# ============================================================================

def plot_convergence(report: ConvergenceReport, path: PathLike, scales: Optional[Sequence[float]] = None,
                     title: str = "recovery sequence") -> Path:
    """Gap columns against the parameter on log-log axes; zero gaps are dropped"""
    table = report.table
    x = np.asarray(scales if scales is not None else table["parameter"], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    for column in GAP_COLUMNS:
        if column not in table:
            continue
        y = table[column].to_numpy(dtype=float)
        keep = y > 0
        if np.any(keep):
            ax.loglog(x[keep], y[keep], marker="o", label=column)
    ax.set_xlabel("parameter")
    ax.set_ylabel("gap")
    ax.set_title(title)
    ax.grid(True, which="both", linewidth=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize="small")
    return _save(fig, path)
