import math

import numpy as np
import pytest

from app.core.exceptions import NonFiniteIntegrand
from app.geometry import (
    AffineMap,
    AnnularSectorRegion,
    CallableMap,
    CircularSegmentRegion,
    DiskRegion,
    PolarTriangleRegion,
    PolygonRegion,
    UnionRegion,
    area_density,
    quadrature_1d,
    quadrature_2d,
    region_from_dict,
)

UNIT_SQUARE = PolygonRegion(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))


def ones(points):
    return np.ones(len(points))


def test_unit_disk_area():
    assert quadrature_2d(DiskRegion((0.0, 0.0), 1.0), ones, 1e-8) == pytest.approx(math.pi, abs=1e-8)


def test_linear_field_on_square():
    assert quadrature_2d(UNIT_SQUARE, lambda p: p[:, 0], 1e-8) == pytest.approx(0.5, abs=1e-8)


def test_identity_area_density_on_square():
    identity = AffineMap(np.eye(2), (0.0, 0.0))
    value = quadrature_2d(UNIT_SQUARE, lambda p: area_density(identity.gradient(p)), 1e-8)
    assert value == pytest.approx(2.0, abs=1e-8)


def test_quadrature_is_additive():
    region = DiskRegion((0.3, -0.2), 0.8)

    def f(p):
        return np.exp(p[:, 0]) * np.cos(p[:, 1])

    def g(p):
        return np.hypot(p[:, 0], p[:, 1]) ** 2

    tol = 1e-8
    total = quadrature_2d(region, lambda p: f(p) + g(p), tol)
    assert quadrature_2d(region, f, tol) + quadrature_2d(region, g, tol) == pytest.approx(total, abs=2 * tol)


def test_quadrature_is_deterministic():
    region = PolygonRegion(np.array([[0, 0], [2, 0], [2, 1], [1, 0.5], [0, 1]], dtype=float))

    def f(p):
        return np.sqrt(1.0 + p[:, 0] ** 2 + np.sin(5 * p[:, 1]) ** 2)

    assert quadrature_2d(region, f, 1e-9) == quadrature_2d(region, f, 1e-9)


def test_nonconvex_polygon_area():
    region = PolygonRegion(np.array([[0, 0], [2, 0], [2, 1], [1, 0.5], [0, 1]], dtype=float))
    assert region.area == pytest.approx(1.5)
    assert quadrature_2d(region, ones, 1e-10) == pytest.approx(1.5, abs=1e-10)


def test_sector_segment_and_union_areas():
    sector = AnnularSectorRegion((0.0, 0.0), 2.0, 0.0, math.pi / 2, r_in=1.0)
    segment = CircularSegmentRegion((0.0, 0.0), 1.0, -math.pi / 6, math.pi / 6)
    union = UnionRegion((AnnularSectorRegion((0.0, 0.0), 1.0, math.pi / 6, 11 * math.pi / 6), segment))

    assert quadrature_2d(sector, ones, 1e-9) == pytest.approx(sector.area, abs=1e-9)
    assert quadrature_2d(segment, ones, 1e-9) == pytest.approx(segment.area, abs=1e-9)
    assert union.area == pytest.approx(math.pi - math.sqrt(3.0) / 4.0, abs=1e-12)


def test_polar_triangle_area():
    region = PolarTriangleRegion((0.0, 0.0), 0.5, (0.0, 0.0), (1.0, 0.0), (1.0, math.pi / 2))
    assert quadrature_2d(region, ones, 1e-10) == pytest.approx(region.area, abs=1e-10)
    assert region.area == pytest.approx(math.pi / 24.0, abs=1e-12)


def test_region_containment():
    segment = CircularSegmentRegion((0.0, 0.0), 1.0, -math.pi / 6, math.pi / 6)
    inside = segment.contains(np.array([[0.95, 0.0], [0.5, 0.0], [0.9, 0.3]]))
    assert inside.tolist() == [True, False, True]


def test_region_round_trip_through_dict():
    region = UnionRegion((DiskRegion((1.0, 2.0), 0.5), UNIT_SQUARE))
    rebuilt = region_from_dict(region.to_dict())
    assert rebuilt.area == pytest.approx(region.area)


def test_non_finite_integrand_raises():
    with pytest.raises(NonFiniteIntegrand):
        quadrature_2d(UNIT_SQUARE, lambda p: np.full(len(p), np.nan), 1e-6)


def test_callable_map_gradient_by_central_differences():
    smooth = CallableMap(lambda p: np.column_stack([p[:, 0] ** 2, p[:, 0] * p[:, 1]]))
    grad = smooth.gradient(np.array([[0.5, 2.0]]))[0]
    np.testing.assert_allclose(grad, [[1.0, 0.0], [2.0, 0.5]], atol=1e-8)


def test_quadrature_1d():
    assert quadrature_1d(lambda t: t, 0.0, 1.0, 1e-10) == pytest.approx(0.5, abs=1e-10)
    assert quadrature_1d(lambda t: abs(t - 0.3), 0.0, 1.0, 1e-10, points=[0.3]) == pytest.approx(
        0.5 * (0.09 + 0.49), abs=1e-10
    )
