"""
Convergence Checks

Numerical witnesses that a recovery sequence converges strictly in BV to its
target map and that its graph areas approach the relaxation formula.

Every integral over a recovery map runs on the map's own smooth pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.config import get_settings
from app.geometry.quadrature import integrate_patches
from app.recovery.maps import RecoveryMap
from app.scene.analysis import circular_slice_tv, total_variation
from app.scene.model import Scene

logger = logging.getLogger(__name__)

GAP_COLUMNS = ("l1_gap", "tv_gap", "slice_gap", "area_gap")
MONOTONE_SLACK = 1e-9
RATE_FLOOR = 1e-14


@dataclass
class ConvergenceReport:
    """One row per sequence element, in parameter order"""
    table: pd.DataFrame
    rates: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def rate(self) -> Optional[float]:
        """Fitted rate of the area gap (or the TV gap when no areas were computed)"""
        if "area_gap" in self.rates:
            return self.rates["area_gap"]
        return self.rates.get("tv_gap")

    def monotone(self, column: str, slack: float = MONOTONE_SLACK) -> bool:
        gaps = self.table[column].to_numpy()
        return bool(np.all(np.diff(gaps) <= slack))

    @property
    def flags(self) -> Dict[str, bool]:
        return {column: self.monotone(column) for column in GAP_COLUMNS if column in self.table}

    @property
    def final(self) -> Dict[str, float]:
        last = self.table.iloc[-1]
        return {column: float(last[column]) for column in GAP_COLUMNS if column in self.table}

    def summary(self) -> str:
        lines = [self.table.to_string(index=False, float_format=lambda v: f"{v:.6e}")]
        for column, ok in self.flags.items():
            lines.append(f"{column}: {'non-increasing' if ok else 'NOT monotone'}")
        if self.rate is not None:
            lines.append(f"fitted rate: {self.rate:.3f}")
        return "\n".join(lines)


# ============================================================================
# INTEGRALS OVER A RECOVERY MAP
# ============================================================================

def _integrate(recovery: RecoveryMap, f, tol: float) -> float:
    patches = [patch for piece in recovery.pieces() for patch in piece.patches()]
    return integrate_patches(patches, f, tol).value


def graph_area(recovery: RecoveryMap, tol: Optional[float] = None) -> float:
    """𝒜(v) = ∫ √(1 + |∇v|² + (det ∇v)²)"""
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    return _integrate(recovery, recovery.area_density, tol)


def recovery_tv(recovery: RecoveryMap, tol: Optional[float] = None) -> float:
    """|Dv|(Ω) = ∫|∇v| for a Lipschitz map"""
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    return _integrate(recovery, recovery.gradient_norm, tol)


def l1_distance(recovery: RecoveryMap, scene: Scene, tol: Optional[float] = None) -> float:
    """∫ |v − u| over the pieces of v"""
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    return _integrate(recovery, lambda x: np.hypot(*(recovery.evaluate(x) - scene.evaluate(x)).T), tol)


def slice_gap(recovery: RecoveryMap, scene: Scene, n_samples: int = 1024) -> float:
    """Largest |TV(v|∂B) − TV(u|∂B)| over the recovery map's slice circles"""
    gaps = []
    for center, radius in recovery.slice_circles():
        ours = circular_slice_tv(recovery, center, radius, n_samples)
        gaps.append(abs(ours - circular_slice_tv(scene, center, radius, n_samples)))
    return max(gaps, default=0.0)


def fitted_rate(scales: Sequence[float], gaps: Sequence[float]) -> Optional[float]:
    """Slope of log(gap) against log(scale); None with fewer than two positive gaps"""
    pairs = [(s, g) for s, g in zip(scales, gaps) if g > RATE_FLOOR and s > 0]
    if len(pairs) < 2:
        return None
    x = np.log([s for s, _ in pairs])
    y = np.log([g for _, g in pairs])
    return float(np.polyfit(x, y, 1)[0])


# ============================================================================
# CHECKS
# ============================================================================

def _rates(sequence: Sequence[RecoveryMap], table: pd.DataFrame, columns) -> Dict[str, Optional[float]]:
    scales = [m.scale for m in sequence]
    return {column: fitted_rate(scales, table[column].tolist()) for column in columns}


def strict_convergence_check(sequence: Sequence[RecoveryMap], scene: Scene,
                             tol: Optional[float] = None) -> ConvergenceReport:
    """
    L¹ distance, total-variation gap and circular slice gaps per element.

    Args:
        sequence: recovery maps, in schedule order
        scene: the target map u
        tol: quadrature tolerance per integral

    Returns:
        ConvergenceReport: columns parameter, l1_gap, tv_gap, slice_gap
    """
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    target_tv = total_variation(scene, tol)
    rows: List[Dict[str, float]] = []
    for recovery in sequence:
        tv = recovery_tv(recovery, tol)
        row = {
            "parameter": recovery.parameter,
            "l1_gap": l1_distance(recovery, scene, tol),
            "tv_gap": abs(tv - target_tv),
            "slice_gap": slice_gap(recovery, scene),
            "tv": tv,
        }
        logger.info(f"Strict convergence at {row['parameter']:g}: L¹ {row['l1_gap']:.3e}, "
                    f"TV gap {row['tv_gap']:.3e}, slice gap {row['slice_gap']:.3e}")
        rows.append(row)
    table = pd.DataFrame(rows, columns=["parameter", "l1_gap", "tv_gap", "slice_gap", "tv"])
    return ConvergenceReport(table, _rates(sequence, table, ("l1_gap", "tv_gap")))


def area_convergence_check(sequence: Sequence[RecoveryMap], formula: float,
                           tol: Optional[float] = None) -> ConvergenceReport:
    """
    Graph area of every element against the relaxation formula.

    Returns:
        ConvergenceReport: columns parameter, area, area_gap, with the fitted
        rate of the area gap
    """
    tol = get_settings().DEFAULT_TOL if tol is None else tol
    rows = []
    for recovery in sequence:
        area = graph_area(recovery, tol)
        rows.append({"parameter": recovery.parameter, "area": area, "area_gap": abs(area - formula)})
        logger.info(f"Area at {recovery.parameter:g}: {area:.12g} (formula {formula:.12g})")
    table = pd.DataFrame(rows, columns=["parameter", "area", "area_gap"])
    return ConvergenceReport(table, _rates(sequence, table, ("area_gap",)))


def recovery_report(sequence: Sequence[RecoveryMap], scene: Scene, formula: float,
                    tol: Optional[float] = None) -> ConvergenceReport:
    """Both checks side by side: parameter, l1_gap, tv_gap, slice_gap, area_gap"""
    strict = strict_convergence_check(sequence, scene, tol)
    area = area_convergence_check(sequence, formula, tol)
    table = strict.table.drop(columns=["tv"]).assign(area=area.table["area"], area_gap=area.table["area_gap"])
    table = table[["parameter", *GAP_COLUMNS, "area"]]
    rates = {**strict.rates, **area.rates}
    report = ConvergenceReport(table, rates)
    for column, ok in report.flags.items():
        if not ok:
            logger.warning(f"{column} is not non-increasing along the schedule")
    if report.rate is not None and math.isfinite(report.rate):
        logger.info(f"Fitted area rate {report.rate:.3f}")
    return report
