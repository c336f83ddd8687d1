"""Plateau Package

Planar Plateau functional P(φ) and its relaxation P̄(γ): disk meshes,
discrete competitors, closed forms, the mesh optimizer and certificates.
"""

from app.plateau.certificate import PlateauCertificate, plateau_certify, plateau_lower, plateau_relaxed
from app.plateau.closed_form import LoopStructure, analyze_loop, is_simple_polygon, plateau_closed_form
from app.plateau.constructive import bouquet_competitor
from app.plateau.loops import loop_boundary_data, snap_vertices, tilde_gamma
from app.plateau.mesh import (
    BoundaryData,
    DiscreteMap,
    DiskMesh,
    cone_extension,
    discrete_jacobian_mass,
    lipschitz_transfer,
)
from app.plateau.optimizer import PlateauOptions, UpperBound, boundary_nodes, plateau_upper, smoothed_mass

__all__ = [
    "BoundaryData",
    "DiscreteMap",
    "DiskMesh",
    "LoopStructure",
    "PlateauCertificate",
    "PlateauOptions",
    "UpperBound",
    "analyze_loop",
    "boundary_nodes",
    "bouquet_competitor",
    "cone_extension",
    "discrete_jacobian_mass",
    "is_simple_polygon",
    "lipschitz_transfer",
    "loop_boundary_data",
    "plateau_certify",
    "plateau_closed_form",
    "plateau_lower",
    "plateau_relaxed",
    "plateau_upper",
    "smoothed_mass",
    "snap_vertices",
    "tilde_gamma",
]
