"""
Scene and Loop Files

JSON reading and writing for the `bv-relax/1` schema. Documents are checked
with the pydantic models in app.models.schema; parse and validation failures
are reported as SceneFormatError with the 1-based line of the offending text
when it can be located.

Callable region maps are referenced by name and resolved through a registry
(`register_callable_map`), since code cannot live in a JSON file.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from app.core.config import get_settings
from app.core.exceptions import InvalidGeometry, SceneFormatError, UnsupportedSchema
from app.geometry.maps import AffineMap, CallableMap, ConstantMap, PlanarMap, RadialAngularMap
from app.geometry.primitives import BoundaryLoop, PiecewiseConstantCircleMap, SampledCircleMap
from app.geometry.regions import region_from_dict
from app.models.schema import LoopDocument, SceneDocument
from app.scene.curves import JumpCurve, MapTrace, curve_from_dict, trace_from_dict
from app.scene.model import Junction, RegionEntry, Scene

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ============================================================================
# CALLABLE MAP REGISTRY
# ============================================================================

_CALLABLE_MAPS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {}


def register_callable_map(name: str):
    """Decorator registering a vectorized map (m, 2) -> (m, 2) under `name`"""
    def decorator(func):
        _CALLABLE_MAPS[name] = func
        return func
    return decorator


def callable_map(name: str) -> CallableMap:
    try:
        return CallableMap(_CALLABLE_MAPS[name], name=name)
    except KeyError as exc:
        raise InvalidGeometry(f"no callable map registered as {name!r}") from exc


@register_callable_map("identity")
def _identity(points: np.ndarray) -> np.ndarray:
    return np.array(points, dtype=float)


@register_callable_map("fold")
def _fold(points: np.ndarray) -> np.ndarray:
    """(x, y) -> (x, |y|), Lipschitz with a crease on y = 0"""
    return np.column_stack([points[:, 0], np.abs(points[:, 1])])


# ============================================================================
# DIAGNOSTICS
# ============================================================================

def _line_of(text: str, loc: Sequence) -> Optional[int]:
    """Best-effort line of a pydantic error location: follow the keys in order"""
    offset = 0
    found = None
    for key in loc:
        if not isinstance(key, str):
            continue
        pos = text.find(f'"{key}"', offset)
        if pos < 0:
            continue
        offset = pos
        found = pos
    if found is None:
        return None
    return text.count("\n", 0, found) + 1


def _parse(text: str, source: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"{source}: invalid JSON ({exc.msg})", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise SceneFormatError(f"{source}: top level must be an object", line=1)
    expected = get_settings().SCHEMA_VERSION
    found = data.get("schema")
    if found != expected:
        raise UnsupportedSchema(
            f"{source}: schema {found!r} is not supported (expected {expected!r})",
            line=_line_of(text, ["schema"]),
        )
    return data


def _validation_failure(exc: ValidationError, text: str, source: str) -> SceneFormatError:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first["loc"])
    return SceneFormatError(f"{source}: {where}: {first['msg']}", line=_line_of(text, first["loc"]))


# ============================================================================
# BUILDERS
# ============================================================================

def map_from_dict(data: dict) -> PlanarMap:
    kind = data["kind"]
    if kind == "constant":
        return ConstantMap(np.asarray(data["value"], dtype=float))
    if kind == "affine":
        return AffineMap(np.asarray(data["matrix"], dtype=float), np.asarray(data["offset"], dtype=float))
    if kind == "radial_angular":
        if data.get("arc_angles") is not None:
            profile = PiecewiseConstantCircleMap(np.asarray(data["values"], dtype=float),
                                                 np.asarray(data["arc_angles"], dtype=float),
                                                 float(data.get("start_angle", 0.0)))
        else:
            profile = SampledCircleMap(np.asarray(data["angles"], dtype=float),
                                       np.asarray(data["values"], dtype=float))
        return RadialAngularMap(profile, tuple(data.get("center", (0.0, 0.0))))
    if kind == "callable":
        return callable_map(data["name"])
    raise InvalidGeometry(f"unknown map kind {kind!r}")


def map_to_dict(region_map: PlanarMap) -> dict:
    if isinstance(region_map, ConstantMap):
        return {"kind": "constant", "value": region_map.value.tolist()}
    if isinstance(region_map, AffineMap):
        return {"kind": "affine", "matrix": region_map.matrix.tolist(), "offset": region_map.offset.tolist()}
    if isinstance(region_map, RadialAngularMap):
        profile = region_map.profile
        out = {"kind": "radial_angular", "center": list(region_map.center), "values": profile.values.tolist()}
        if isinstance(profile, PiecewiseConstantCircleMap):
            out.update(arc_angles=profile.arc_angles.tolist(), start_angle=profile.start_angle)
        else:
            out.update(angles=profile.angles.tolist())
        return out
    if isinstance(region_map, CallableMap):
        if region_map.name not in _CALLABLE_MAPS:
            raise InvalidGeometry(f"callable map {region_map.name!r} is not registered and cannot be saved")
        return {"kind": "callable", "name": region_map.name}
    raise InvalidGeometry(f"cannot serialize map of type {type(region_map).__name__}")


def scene_from_document(doc: SceneDocument) -> Scene:
    domain = region_from_dict(doc.domain.model_dump())
    regions = tuple(
        RegionEntry(r.id, region_from_dict(r.region.model_dump()), map_from_dict(r.map.model_dump()))
        for r in doc.regions
    )
    curves = []
    for c in doc.jump_curves:
        alpha = curve_from_dict(c.curve.model_dump())
        if c.traces == "regions":
            curves.append(JumpCurve(c.id, alpha, a=c.a))
        else:
            minus = trace_from_dict(c.traces.minus.model_dump(), alpha.length)
            plus = trace_from_dict(c.traces.plus.model_dump(), alpha.length)
            curves.append(JumpCurve(c.id, alpha, minus, plus, a=c.a))
    junctions = tuple(
        Junction(j.id, j.point, np.asarray(j.sector_values, dtype=float),
                 np.asarray(j.sector_angles, dtype=float), j.start_angle)
        for j in doc.junctions
    )
    return Scene(domain, regions, tuple(curves), junctions, name=doc.name, metadata=dict(doc.metadata))


def scene_to_dict(scene: Scene) -> dict:
    curves = []
    for curve in scene.jump_curves:
        entry = {"id": curve.id, "curve": curve.alpha.to_dict(), "a": curve.a}
        if isinstance(curve.trace_plus, MapTrace) and isinstance(curve.trace_minus, MapTrace):
            entry["traces"] = "regions"
        else:
            entry["traces"] = {"minus": curve.trace_minus.to_dict(), "plus": curve.trace_plus.to_dict()}
        curves.append(entry)
    return {
        "schema": get_settings().SCHEMA_VERSION,
        "name": scene.name,
        "domain": scene.domain.to_dict(),
        "regions": [{"id": e.id, "region": e.region.to_dict(), "map": map_to_dict(e.map)} for e in scene.regions],
        "jump_curves": curves,
        "junctions": [
            {"id": j.id, "point": list(j.point), "sector_values": j.sector_values.tolist(),
             "sector_angles": j.sector_angles.tolist(), "start_angle": j.start_angle}
            for j in scene.junctions
        ],
        "metadata": {k: v for k, v in scene.metadata.items() if isinstance(v, (str, int, float, bool))},
    }


# ============================================================================
# FILES
# ============================================================================

def parse_scene(text: str, source: str = "<scene>") -> Scene:
    """
    Build a scene from JSON text.

    Raises:
        UnsupportedSchema: unknown `schema` value
        SceneFormatError: malformed JSON, schema violation or invalid geometry
    """
    data = _parse(text, source)
    try:
        doc = SceneDocument.model_validate(data)
    except ValidationError as exc:
        raise _validation_failure(exc, text, source) from exc
    try:
        return scene_from_document(doc)
    except InvalidGeometry as exc:
        raise SceneFormatError(f"{source}: {exc}") from exc


def _read_utf8(path: Path) -> str:
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[:exc.start].count(b"\n") + 1
        raise SceneFormatError(f"{path}: not valid UTF-8", line=line) from exc


def load_scene(path: PathLike) -> Scene:
    path = Path(path)
    text = _read_utf8(path)
    scene = parse_scene(text, str(path))
    logger.info(f"Loaded scene '{scene.name}' from {path}: {len(scene.regions)} regions, "
                f"{len(scene.jump_curves)} curves, {len(scene.junctions)} junctions")
    return scene


def save_scene(scene: Scene, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(scene_to_dict(scene), indent=2) + "\n", encoding="utf-8")
    logger.info(f"Saved scene '{scene.name}' to {path}")
    return path


def parse_loop(text: str, source: str = "<loop>") -> BoundaryLoop:
    data = _parse(text, source)
    try:
        doc = LoopDocument.model_validate(data)
    except ValidationError as exc:
        raise _validation_failure(exc, text, source) from exc
    try:
        return BoundaryLoop.from_points(doc.vertices).repeated(doc.repeat)
    except InvalidGeometry as exc:
        raise SceneFormatError(f"{source}: {exc}") from exc


def load_loop(path: PathLike) -> BoundaryLoop:
    """Read a loop file: {"schema", "name", "vertices", "repeat"}"""
    path = Path(path)
    loop = parse_loop(_read_utf8(path), str(path))
    logger.info(f"Loaded loop from {path}: {loop.n_vertices} vertices")
    return loop


def save_loop(loop: BoundaryLoop, path: PathLike, name: str = "loop") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema": get_settings().SCHEMA_VERSION, "name": name, "vertices": loop.vertices.tolist(), "repeat": 1}
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path
