"""Geometry Package

Planar primitives: winding numbers, degree of circle maps, curve lengths,
regions and deterministic adaptive quadrature.
"""

from app.geometry.degree import circle_map_degree
from app.geometry.maps import (
    AffineMap,
    CallableMap,
    ConstantMap,
    PlanarMap,
    RadialAngularMap,
    area_density,
    gradient_norm,
    jacobian_determinant,
)
from app.geometry.primitives import (
    TWO_PI,
    BoundaryLoop,
    PiecewiseConstantCircleMap,
    Point2,
    SampledCircleMap,
    as_points,
    curve_tv,
)
from app.geometry.quadrature import QuadratureResult, integrate_patches, patch_nodes, quadrature_1d, quadrature_2d
from app.geometry.regions import (
    AnnularSectorRegion,
    CircularSegmentRegion,
    DiskRegion,
    PolarTriangleRegion,
    PolygonRegion,
    RegionSpec,
    UnionRegion,
    region_from_dict,
)
from app.geometry.winding import (
    WindingAreaBracket,
    polygon_winding,
    polygon_winding_many,
    winding_area_bracket,
    winding_area_integral,
)

__all__ = [
    "TWO_PI",
    "AffineMap",
    "AnnularSectorRegion",
    "BoundaryLoop",
    "CallableMap",
    "CircularSegmentRegion",
    "ConstantMap",
    "DiskRegion",
    "PiecewiseConstantCircleMap",
    "PlanarMap",
    "Point2",
    "PolarTriangleRegion",
    "PolygonRegion",
    "QuadratureResult",
    "RadialAngularMap",
    "RegionSpec",
    "SampledCircleMap",
    "UnionRegion",
    "WindingAreaBracket",
    "area_density",
    "as_points",
    "circle_map_degree",
    "curve_tv",
    "gradient_norm",
    "integrate_patches",
    "jacobian_determinant",
    "patch_nodes",
    "polygon_winding",
    "polygon_winding_many",
    "quadrature_1d",
    "quadrature_2d",
    "region_from_dict",
    "winding_area_bracket",
    "winding_area_integral",
]
