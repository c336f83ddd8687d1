"""
File Schemas

Pydantic models for the `bv-relax/1` JSON documents: scenes, loops, Plateau
certificates and area breakdowns. Geometry kinds are discriminated unions on
the `kind` field, matching the `to_dict` forms of the geometry objects.
"""

import math
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Point = Tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _finite_point(v: Point) -> Point:
    if not all(math.isfinite(c) for c in v):
        raise ValueError("coordinates must be finite")
    return v


# ============================================================================
# Regions
# ============================================================================

class PolygonModel(_Strict):
    kind: Literal["polygon"]
    vertices: List[Point] = Field(..., min_length=3, description="Simple polygon, any orientation")


class DiskModel(_Strict):
    kind: Literal["disk"]
    center: Point
    radius: float = Field(..., gt=0)


class SectorModel(_Strict):
    kind: Literal["sector"]
    center: Point
    r_out: float = Field(..., gt=0)
    theta0: float
    theta1: float
    r_in: float = Field(0.0, ge=0)


class SegmentModel(_Strict):
    kind: Literal["segment"]
    center: Point
    radius: float = Field(..., gt=0)
    theta0: float
    theta1: float


class PolarTriangleModel(_Strict):
    kind: Literal["polar_triangle"]
    center: Point
    scale: float = Field(..., gt=0)
    a: Point
    b: Point
    c: Point


class UnionModel(_Strict):
    kind: Literal["union"]
    parts: List["RegionModel"] = Field(..., min_length=1)


RegionModel = Annotated[
    Union[PolygonModel, DiskModel, SectorModel, SegmentModel, PolarTriangleModel, UnionModel],
    Field(discriminator="kind"),
]
UnionModel.model_rebuild()


# ============================================================================
# Maps
# ============================================================================

class ConstantMapModel(_Strict):
    kind: Literal["constant"]
    value: Point

    @field_validator("value")
    @classmethod
    def finite_value(cls, v):
        return _finite_point(v)


class AffineMapModel(_Strict):
    kind: Literal["affine"]
    matrix: Tuple[Point, Point] = Field(..., description="Rows of A in u(x) = A x + b")
    offset: Point = (0.0, 0.0)


class RadialAngularMapModel(_Strict):
    """
    u(x) = φ(angle of x − center). Piecewise constant when `arc_angles` is
    given, otherwise sampled at `angles` and interpolated linearly.
    """
    kind: Literal["radial_angular"]
    center: Point = (0.0, 0.0)
    values: List[Point] = Field(..., min_length=1)
    arc_angles: Optional[List[float]] = None
    start_angle: float = 0.0
    angles: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_profile(self):
        if (self.arc_angles is None) == (self.angles is None):
            raise ValueError("give exactly one of arc_angles (piecewise constant) or angles (sampled)")
        other = self.arc_angles if self.arc_angles is not None else self.angles
        if len(other) != len(self.values):
            raise ValueError("values and angles must have the same length")
        return self


class CallableMapModel(_Strict):
    kind: Literal["callable"]
    name: str = Field(..., min_length=1, description="Key in the callable map registry")


MapModel = Annotated[
    Union[ConstantMapModel, AffineMapModel, RadialAngularMapModel, CallableMapModel],
    Field(discriminator="kind"),
]


# ============================================================================
# Curves and traces
# ============================================================================

class PolylineCurveModel(_Strict):
    kind: Literal["polyline"]
    vertices: List[Point] = Field(..., min_length=2)


class ArcCurveModel(_Strict):
    kind: Literal["arc"]
    center: Point
    radius: float = Field(..., gt=0)
    theta0: float
    theta1: float


CurveModel = Annotated[Union[PolylineCurveModel, ArcCurveModel], Field(discriminator="kind")]


class ConstantTraceModel(_Strict):
    kind: Literal["constant"]
    value: Point


class LinearTraceModel(_Strict):
    kind: Literal["linear"]
    start: Point
    end: Point


class PolylineTraceModel(_Strict):
    kind: Literal["polyline"]
    params: List[float] = Field(..., min_length=2)
    values: List[Point] = Field(..., min_length=2)


TraceModel = Annotated[
    Union[ConstantTraceModel, LinearTraceModel, PolylineTraceModel], Field(discriminator="kind")
]


class TracePairModel(_Strict):
    minus: TraceModel
    plus: TraceModel


class JumpCurveModel(_Strict):
    id: str = Field(..., min_length=1)
    curve: CurveModel
    traces: Union[Literal["regions"], TracePairModel] = "regions"
    a: float = 0.0


class JunctionModel(_Strict):
    id: str = Field(..., min_length=1)
    point: Point
    sector_values: List[Point] = Field(..., min_length=1)
    sector_angles: List[float] = Field(..., min_length=1)
    start_angle: float = 0.0

    @model_validator(mode="after")
    def check_lengths(self):
        if len(self.sector_values) != len(self.sector_angles):
            raise ValueError("sector_values and sector_angles must have the same length")
        return self


class RegionEntryModel(_Strict):
    id: str = Field(..., min_length=1)
    region: RegionModel
    map: MapModel


# ============================================================================
# Documents
# ============================================================================

class SceneDocument(_Strict):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: str = Field(..., alias="schema")
    name: str = "scene"
    domain: RegionModel
    regions: List[RegionEntryModel] = Field(..., min_length=1)
    jump_curves: List[JumpCurveModel] = Field(default_factory=list)
    junctions: List[JunctionModel] = Field(default_factory=list)
    metadata: Dict[str, Union[str, float, int, bool]] = Field(default_factory=dict)

    @field_validator("regions")
    @classmethod
    def unique_region_ids(cls, v):
        ids = [r.id for r in v]
        if len(set(ids)) != len(ids):
            raise ValueError("region ids must be unique")
        return v


class LoopDocument(_Strict):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: str = Field(..., alias="schema")
    name: str = "loop"
    vertices: List[Point] = Field(..., min_length=1)
    repeat: int = Field(1, ge=1, description="Number of traversals")


class CertificateRecord(BaseModel):
    name: str
    lower: float = Field(..., ge=0)
    upper: float = Field(..., ge=0)
    upper_method: str
    closed_form: Optional[float] = None
    mesh: Dict[str, int] = Field(default_factory=dict)
    iterations: int = 0
    converged: bool = True


class BreakdownRecord(BaseModel):
    name: str
    regular: float
    jump_terms: Dict[str, float]
    junction_terms: Dict[str, CertificateRecord]
    total_lower: float
    total_upper: float
    formula: Optional[str] = None
