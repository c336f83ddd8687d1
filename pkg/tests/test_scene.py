import json
import math
from pathlib import Path

import numpy as np
import pytest

from app.core.exceptions import BallTooLarge, InvalidGeometry, InvalidScene, SceneFormatError, UnsupportedSchema
from app.geometry import AffineMap, CallableMap, ConstantMap, PiecewiseConstantCircleMap, PolygonRegion
from app.scene import (
    CircularArcCurve,
    JumpCurve,
    Junction,
    PolylineCurve,
    RegionEntry,
    Scene,
    check_arc_length,
    circular_slice_tv,
    default_trace_radius,
    infinite_triple_limit_tv,
    infinite_triple_scene,
    junction_trace,
    load_loop,
    load_scene,
    merge_repeated_values,
    n_uple_circle_data,
    n_uple_scene,
    parse_scene,
    save_scene,
    straight_jump_scene,
    total_variation,
    triple_point_scene,
    validate_network,
)

TRIANGLE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
TRIANGLE_JUMPS = 2.0 + math.sqrt(2.0)


@pytest.fixture
def triple():
    return triple_point_scene(TRIANGLE, r=1.0)


def crossing_scene():
    domain = PolygonRegion(np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float))
    quadrants = [
        ("q1", [[0, 0], [1, 0], [1, 1], [0, 1]], (1.0, 0.0)),
        ("q2", [[0, 0], [0, 1], [-1, 1], [-1, 0]], (0.0, 1.0)),
        ("q3", [[0, 0], [-1, 0], [-1, -1], [0, -1]], (0.0, 0.0)),
        ("q4", [[0, 0], [0, -1], [1, -1], [1, 0]], (1.0, 1.0)),
    ]
    regions = tuple(RegionEntry(i, PolygonRegion(np.array(v, dtype=float)), ConstantMap(c)) for i, v, c in quadrants)
    curves = (
        JumpCurve("h", PolylineCurve(np.array([[-1.0, 0.0], [1.0, 0.0]]))),
        JumpCurve("v", PolylineCurve(np.array([[0.0, -1.0], [0.0, 1.0]]))),
    )
    return Scene(domain, regions, curves, name="crossing")


# ----------------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------------

def test_triple_point_scene_is_valid(triple):
    report = validate_network(triple)

    assert report.passed, report.summary()
    assert report.junction_count == 1
    assert report.junction_sectors == [3]
    assert report.warnings == []


def test_crossing_curves_fail_validation():
    report = validate_network(crossing_scene())

    assert not report.passed
    assert any("intersect off-junction" in v for v in report.violations)


def test_two_sector_junction_fails_validation(triple):
    bad = Junction("p0", (0.0, 0.0), np.array(TRIANGLE[:2]), np.array([math.pi, math.pi]))
    scene = Scene(triple.domain, triple.regions, triple.jump_curves, (bad,))

    report = validate_network(scene)

    assert not report.passed
    assert any("N_i < 3" in v for v in report.violations)


def test_angle_sum_violation(triple):
    bad = Junction("p0", (0.0, 0.0), np.array(TRIANGLE), np.array([2.0, 2.0, 2.0]))
    report = validate_network(Scene(triple.domain, triple.regions, triple.jump_curves, (bad,)))
    assert any("angle sum" in v for v in report.violations)


def test_dangling_curve_end_fails_validation(triple):
    stub = JumpCurve("stub", PolylineCurve(np.array([[0.2, 0.5], [0.4, 0.5]])))
    scene = Scene(triple.domain, triple.regions, triple.jump_curves + (stub,), triple.junctions)
    report = validate_network(scene)
    assert any("neither at a junction nor on ∂Ω" in v for v in report.violations)


def _box(x0, y0, x1, y1):
    return PolygonRegion(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float))


def test_overlapping_regions_fail_even_when_areas_add_up():
    # A and B overlap on [1, 1.5] x [0, 1] while [1.5, 2] x [1, 2] is left uncovered
    regions = (
        RegionEntry("A", _box(0.0, 0.0, 1.5, 2.0), ConstantMap((0.0, 0.0))),
        RegionEntry("B", _box(1.0, 0.0, 2.0, 1.0), ConstantMap((1.0, 0.0))),
    )
    scene = Scene(_box(0.0, 0.0, 2.0, 2.0), regions, name="overlap")

    report = validate_network(scene)

    assert not report.passed
    assert not any("cover area" in v for v in report.violations)
    assert any("regions A and B overlap" in v for v in report.violations)


def test_edge_sharing_regions_do_not_overlap():
    report = validate_network(crossing_scene())
    assert not any("overlap" in v for v in report.violations)


def test_infinite_triple_truncation_is_valid():
    scene = infinite_triple_scene(levels=3)
    report = validate_network(scene)

    assert report.passed, report.summary()
    assert report.junction_count == 8
    assert set(report.junction_sectors) == {3}


def test_two_value_scene_has_no_junction():
    gamma = PiecewiseConstantCircleMap([(0.0, 0.0), (2.0, 0.0)], [math.pi / 2, 3 * math.pi / 2])
    scene = n_uple_scene(gamma, r=1.5)

    assert scene.junctions == ()
    assert len(scene.jump_curves) == 1
    assert validate_network(scene).passed
    assert total_variation(scene, 1e-9) == pytest.approx(2 * 1.5 * 2.0, abs=1e-8)


# ----------------------------------------------------------------------------
# circle data helpers
# ----------------------------------------------------------------------------

def test_merge_repeated_values_wraps_around():
    a, b = (0.0, 0.0), (1.0, 0.0)
    gamma = PiecewiseConstantCircleMap.uniform([a, a, b, a])

    merged = merge_repeated_values(gamma)

    assert merged.n_values == 2
    np.testing.assert_allclose(merged.values, [b, a])
    np.testing.assert_allclose(merged.arc_angles, [math.pi / 2, 3 * math.pi / 2])
    assert merged.start_angle == pytest.approx(math.pi)


def test_constant_circle_data_gives_single_region():
    scene = n_uple_scene(PiecewiseConstantCircleMap.uniform([(1.0, 1.0)] * 3))
    assert len(scene.regions) == 1
    assert scene.jump_curves == ()


# ----------------------------------------------------------------------------
# curves and traces
# ----------------------------------------------------------------------------

def test_straight_jump_plus_side_is_upper_half():
    scene = straight_jump_scene(0.0, 2.0, upper=(1.0, 0.0), lower=(0.0, 0.0))
    curve = scene.jump_curves[0]

    np.testing.assert_allclose(curve.jump(np.array([0.5, 1.5])), [[1.0, 0.0], [1.0, 0.0]])
    assert scene.sides_of(curve) == ("lower", "upper")


def test_arc_curve_is_arc_length_parametrized():
    arc = CircularArcCurve((0.0, 0.0), 2.0, 0.0, -1.0)
    assert arc.length == pytest.approx(2.0)
    assert check_arc_length(arc) < 1e-8


def test_split_keeps_jump_values():
    scene = straight_jump_scene(0.0, 1.0)
    first, second = scene.jump_curves[0].split(0.4)

    assert first.length == pytest.approx(0.4)
    assert second.a == pytest.approx(0.4)
    np.testing.assert_allclose(second.jump(np.array([0.7])), [[1.0, 0.0]])


# ----------------------------------------------------------------------------
# junction traces
# ----------------------------------------------------------------------------

def test_triple_point_trace_limits(triple):
    trace = junction_trace(triple, 0, 0.5)

    np.testing.assert_allclose(trace.limit.values, TRIANGLE)
    np.testing.assert_allclose(trace.limit.arc_angles, [2 * math.pi / 3] * 3)
    assert trace.limit_method == "closed-form"
    np.testing.assert_allclose(trace.samples.evaluate(np.array([1.0, 3.0, 5.0])), TRIANGLE)


def test_affine_regions_limit_is_value_at_junction():
    center = (0.3, -0.2)
    base = n_uple_scene(PiecewiseConstantCircleMap.uniform(TRIANGLE), r=1.0, center=center)
    rng = np.random.default_rng(11)
    maps = [AffineMap(rng.normal(size=(2, 2)), rng.normal(size=2)) for _ in base.regions]
    regions = tuple(RegionEntry(e.id, e.region, m) for e, m in zip(base.regions, maps))
    scene = Scene(base.domain, regions, base.jump_curves, base.junctions)

    limits = [junction_trace(scene, 0, rho).limit.values for rho in (0.4, 0.1)]

    expected = [m.matrix @ np.asarray(center) + m.offset for m in maps]
    np.testing.assert_allclose(limits[0], expected, atol=1e-12)
    np.testing.assert_array_equal(limits[0], limits[1])


def test_callable_regions_limit_by_extrapolation(triple):
    def perturbed(value):
        return CallableMap(lambda x: np.asarray(value) + np.column_stack([x[:, 0] ** 2, x[:, 1] ** 2]))

    regions = tuple(RegionEntry(e.id, e.region, perturbed(v)) for e, v in zip(triple.regions, TRIANGLE))
    scene = Scene(triple.domain, regions, triple.jump_curves, triple.junctions)

    coarse = junction_trace(scene, 0, 0.2)
    fine = junction_trace(scene, 0, 0.1)

    assert coarse.limit_method == "richardson"
    np.testing.assert_allclose(coarse.limit.values, TRIANGLE, atol=1e-6)
    assert np.max(np.abs(coarse.limit.values - fine.limit.values)) < 1e-6


def test_ball_leaving_domain(triple):
    with pytest.raises(BallTooLarge):
        junction_trace(triple, 0, 1.5)


def test_ball_meeting_other_curve():
    scene = infinite_triple_scene(levels=3)
    with pytest.raises(BallTooLarge):
        junction_trace(scene, 0, 0.3)
    rho = default_trace_radius(scene, 0)
    assert junction_trace(scene, 0, rho).limit.n_values == 3


# ----------------------------------------------------------------------------
# total variation
# ----------------------------------------------------------------------------

def test_triple_point_total_variation(triple):
    assert total_variation(triple, 1e-9) == pytest.approx(TRIANGLE_JUMPS, abs=1e-8)


def test_constant_map_total_variation():
    scene = n_uple_scene(PiecewiseConstantCircleMap.uniform([(2.0, 3.0)]))
    assert total_variation(scene, 1e-9) == 0.0


def test_infinite_triple_total_variation_converges():
    limit = infinite_triple_limit_tv((0, 0), (1, 0), (0, 1))
    assert limit == pytest.approx(3.0 + math.sqrt(2.0))

    tv = total_variation(infinite_triple_scene(levels=20), 1e-10)

    assert abs(tv - limit) < 1e-6


def test_total_variation_is_additive_over_halves():
    whole = straight_jump_scene(0.0, 2.0, upper=AffineMap(np.eye(2), (1.0, 0.0)))
    left = straight_jump_scene(0.0, 1.0, upper=AffineMap(np.eye(2), (1.0, 0.0)))
    right = straight_jump_scene(1.0, 2.0, upper=AffineMap(np.eye(2), (1.0, 0.0)))
    tol = 1e-8

    assert total_variation(left, tol) + total_variation(right, tol) == pytest.approx(
        total_variation(whole, tol), abs=2 * tol
    )


# ----------------------------------------------------------------------------
# circular slices
# ----------------------------------------------------------------------------

def test_slice_of_constant_map_is_zero():
    assert circular_slice_tv(ConstantMap((1.0, 2.0)), (0.0, 0.0), 1.0, 64) == 0.0


def test_slice_of_identity_is_circumference():
    identity = AffineMap(np.eye(2), (0.0, 0.0))
    assert circular_slice_tv(identity, (0.0, 0.0), 1.0, 4096) == pytest.approx(2 * math.pi, rel=1e-6)


@pytest.mark.parametrize("r", [0.1, 0.5, 0.9])
def test_slice_of_triple_point_is_radius_independent(triple, r):
    assert circular_slice_tv(triple, (0.0, 0.0), r, 999) == pytest.approx(TRIANGLE_JUMPS, abs=1e-12)


def test_slice_needs_sixteen_samples():
    with pytest.raises(InvalidGeometry):
        circular_slice_tv(ConstantMap((0.0, 0.0)), (0.0, 0.0), 1.0, 8)


# ----------------------------------------------------------------------------
# files
# ----------------------------------------------------------------------------

def test_scene_file_round_trip(triple, tmp_path):
    path = save_scene(triple, tmp_path / "triple.json")

    loaded = load_scene(path)

    assert loaded.name == triple.name
    assert len(loaded.regions) == 3
    assert validate_network(loaded).passed
    assert total_variation(loaded, 1e-9) == pytest.approx(TRIANGLE_JUMPS, abs=1e-8)


def test_explicit_traces_round_trip(tmp_path):
    doc = {
        "schema": "bv-relax/1",
        "name": "explicit",
        "domain": {"kind": "polygon", "vertices": [[0, -1], [1, -1], [1, 1], [0, 1]]},
        "regions": [
            {"id": "up", "region": {"kind": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
             "map": {"kind": "constant", "value": [1, 0]}},
            {"id": "down", "region": {"kind": "polygon", "vertices": [[0, -1], [1, -1], [1, 0], [0, 0]]},
             "map": {"kind": "callable", "name": "identity"}},
        ],
        "jump_curves": [{
            "id": "j", "curve": {"kind": "polyline", "vertices": [[0, 0], [1, 0]]},
            "traces": {"minus": {"kind": "constant", "value": [0, 0]},
                       "plus": {"kind": "linear", "start": [0, 0], "end": [1, 0]}},
        }],
    }
    scene = parse_scene(json.dumps(doc))

    np.testing.assert_allclose(scene.jump_curves[0].jump(np.array([0.25])), [[0.25, 0.0]])
    reloaded = load_scene(save_scene(scene, tmp_path / "explicit.json"))
    np.testing.assert_allclose(reloaded.jump_curves[0].jump(np.array([0.25])), [[0.25, 0.0]])


def test_malformed_json_reports_line():
    text = '{\n  "schema": "bv-relax/1",\n  "name": "broken",\n  "domain": {\n'
    with pytest.raises(SceneFormatError) as exc:
        parse_scene(text)
    assert exc.value.line is not None
    assert str(exc.value).startswith(f"line {exc.value.line}:")


def test_schema_violation_reports_line():
    text = "\n".join([
        "{",
        '  "schema": "bv-relax/1",',
        '  "domain": {"kind": "disk", "center": [0, 0], "radius": -1},',
        '  "regions": []',
        "}",
    ])
    with pytest.raises(SceneFormatError) as exc:
        parse_scene(text)
    assert exc.value.line == 3


def test_unknown_schema_is_rejected():
    text = json.dumps({"schema": "bv-relax/9", "domain": {}, "regions": []})
    with pytest.raises(UnsupportedSchema):
        parse_scene(text)


def test_non_utf8_file_reports_line(tmp_path):
    path = tmp_path / "scene.json"
    path.write_bytes(b'{\n  "schema": "bv-relax/1",\n  "name": "caf\xe9"\n}\n')

    with pytest.raises(SceneFormatError, match="not valid UTF-8") as exc:
        load_scene(path)
    assert exc.value.line == 3
    with pytest.raises(SceneFormatError):
        load_loop(path)


def test_loop_file_with_repeat(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({
        "schema": "bv-relax/1", "name": "square", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "repeat": 2,
    }))

    loop = load_loop(path)

    assert loop.n_vertices == 8
    assert loop.length == pytest.approx(8.0)


SAMPLE_DIR = Path(__file__).resolve().parent.parent / "scenes"


def test_sample_files_load():
    triple = load_scene(SAMPLE_DIR / "triple_point.json")
    jump = load_scene(SAMPLE_DIR / "straight_jump.json")

    assert validate_network(triple).passed
    assert jump.metadata["kind"] == "straight-jump"
    assert load_loop(SAMPLE_DIR / "triangle_loop.json").n_vertices == 3
    assert load_loop(SAMPLE_DIR / "double_eight_loop.json").n_vertices == 12


# ----------------------------------------------------------------------------
# n-uple circle data
# ----------------------------------------------------------------------------

def test_circle_data_survives_save_and_load(tmp_path):
    gamma = PiecewiseConstantCircleMap(np.array(TRIANGLE), np.array([1.0, 2.0, 2.0 * math.pi - 3.0]), 0.4)
    scene = load_scene(save_scene(n_uple_scene(gamma, r=2.0, center=(1.0, -1.0)), tmp_path / "n.json"))

    recovered, r, center = n_uple_circle_data(scene)

    assert r == pytest.approx(2.0)
    assert center == pytest.approx((1.0, -1.0))
    assert recovered.start_angle == pytest.approx(0.4)
    np.testing.assert_allclose(recovered.values, gamma.values)
    np.testing.assert_allclose(recovered.arc_angles, gamma.arc_angles)


def test_circle_data_rejects_polygon_regions():
    with pytest.raises(InvalidScene):
        n_uple_circle_data(straight_jump_scene())
