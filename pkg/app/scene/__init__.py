"""Scene Package

Piecewise Lipschitz maps: regions, jump curves with traces, junctions,
network validation, total variation, junction traces and scene files.
"""

from app.scene.analysis import (
    JunctionTrace,
    circular_slice_tv,
    default_trace_radius,
    junction_trace,
    total_variation,
)
from app.scene.curves import (
    CircularArcCurve,
    ConstantTrace,
    JumpCurve,
    LinearTrace,
    MapTrace,
    PolylineCurve,
    PolylineTrace,
    check_arc_length,
)
from app.scene.io import (
    callable_map,
    load_loop,
    load_scene,
    parse_loop,
    parse_scene,
    register_callable_map,
    save_loop,
    save_scene,
    scene_to_dict,
)
from app.scene.library import (
    double_butterfly_scene,
    double_butterfly_values,
    five_point_scene,
    five_point_values,
    infinite_triple_limit_tv,
    infinite_triple_scene,
    merge_repeated_values,
    n_uple_circle_data,
    n_uple_scene,
    straight_jump_scene,
    triple_point_scene,
)
from app.scene.model import Junction, RegionEntry, Scene
from app.scene.validation import ValidationReport, validate_network

__all__ = [
    "CircularArcCurve",
    "ConstantTrace",
    "JumpCurve",
    "Junction",
    "JunctionTrace",
    "LinearTrace",
    "MapTrace",
    "PolylineCurve",
    "PolylineTrace",
    "RegionEntry",
    "Scene",
    "ValidationReport",
    "callable_map",
    "check_arc_length",
    "circular_slice_tv",
    "default_trace_radius",
    "double_butterfly_scene",
    "double_butterfly_values",
    "five_point_scene",
    "five_point_values",
    "infinite_triple_limit_tv",
    "infinite_triple_scene",
    "junction_trace",
    "load_loop",
    "load_scene",
    "merge_repeated_values",
    "n_uple_circle_data",
    "n_uple_scene",
    "parse_loop",
    "parse_scene",
    "register_callable_map",
    "save_loop",
    "save_scene",
    "scene_to_dict",
    "straight_jump_scene",
    "total_variation",
    "triple_point_scene",
    "validate_network",
]
