"""
Plateau Certificates

Two-sided bounds for P(φ) and P̄(γ): the certified lower end of the winding
integral, and the best of the closed form, the constructive competitor and
the mesh optimizer as upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Dict, Optional

from app.geometry.primitives import BoundaryLoop, PiecewiseConstantCircleMap
from app.geometry.winding import winding_area_bracket
from app.models.schema import CertificateRecord
from app.plateau.closed_form import analyze_loop
from app.plateau.constructive import bouquet_competitor
from app.plateau.loops import loop_boundary_data, tilde_gamma
from app.plateau.mesh import DiscreteMap
from app.plateau.optimizer import PlateauOptions, plateau_upper

logger = logging.getLogger(__name__)

CERTIFICATE_SLACK = 1e-9


@dataclass
class PlateauCertificate:
    """lower <= P <= upper, with the method that produced the upper bound"""
    lower: float
    upper: float
    upper_method: str
    closed_form: Optional[float] = None
    closed_form_kind: Optional[str] = None
    mesh_stats: Dict[str, int] = field(default_factory=dict)
    iterations: int = 0
    converged: bool = True
    competitor: Optional[DiscreteMap] = field(default=None, repr=False)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def is_exact(self) -> bool:
        return self.closed_form is not None

    @property
    def value(self) -> float:
        """The closed form when known, else the upper bound"""
        return self.closed_form if self.closed_form is not None else self.upper

    def to_record(self, name: str) -> CertificateRecord:
        return CertificateRecord(
            name=name,
            lower=self.lower,
            upper=self.upper,
            upper_method=self.upper_method,
            closed_form=self.closed_form,
            mesh=dict(self.mesh_stats),
            iterations=self.iterations,
            converged=self.converged,
        )


def plateau_lower(loop: BoundaryLoop, tol: Optional[float] = None) -> float:
    """Certified lower bound ∫|w| − (quadtree error) <= P(loop); 0 for degenerate loops"""
    return max(0.0, winding_area_bracket(loop, tol).lower)


def plateau_certify(loop: BoundaryLoop, options: Optional[PlateauOptions] = None) -> PlateauCertificate:
    """
    Lower and upper bounds for P(loop).

    The upper bound is the minimum over the closed form (when the loop is
    recognized), the constructive bouquet competitor and the mesh optimizer.
    With options.optimize == "auto" the optimizer only runs for unrecognized
    loops.
    """
    options = options or PlateauOptions()
    lower = plateau_lower(loop, options.tol)
    structure = analyze_loop(loop)

    candidates = []
    cert_kwargs = {}
    if structure is not None:
        candidates.append((structure.value, "closedForm", None, {}, 0, True))
        cert_kwargs = {"closed_form": structure.value, "closed_form_kind": structure.kind}

    if options.use_constructive and structure is not None and structure.kind == "commutator":
        competitor = bouquet_competitor(loop_boundary_data(loop, options.n_angular))
        if competitor is not None:
            candidates.append((competitor.jacobian_mass(), "constructive", competitor,
                               competitor.mesh.stats(), 0, True))

    run_optimizer = options.optimize == "always" or (options.optimize == "auto" and structure is None)
    if run_optimizer or not candidates:
        upper = plateau_upper(loop, options)
        candidates.append((upper.mass, upper.method, upper.competitor, upper.mesh_stats,
                           upper.iterations, upper.converged))

    best = min(candidates, key=lambda c: c[0])
    if structure is not None and candidates[0][0] <= best[0] + 1e-12:
        best = candidates[0]
    value, method, competitor, stats, iterations, converged = best
    cert = PlateauCertificate(lower, value, method, mesh_stats=stats, iterations=iterations,
                              converged=converged, competitor=competitor, **cert_kwargs)
    if cert.lower > cert.upper + CERTIFICATE_SLACK:
        logger.error(f"Certificate inverted: lower {cert.lower:.12g} > upper {cert.upper:.12g}")
    logger.info(
        f"Plateau certificate: [{cert.lower:.12g}, {cert.upper:.12g}] via {cert.upper_method}"
        + (f" (closed form {structure.kind})" if structure is not None else "")
    )
    return cert


def plateau_relaxed(gamma: PiecewiseConstantCircleMap,
                    options: Optional[PlateauOptions] = None) -> PlateauCertificate:
    """P̄(γ) = P(γ̃) for piecewise constant circle data"""
    return plateau_certify(tilde_gamma(gamma), options)
