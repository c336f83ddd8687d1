import math

import numpy as np
import pytest

from app.core.config import get_settings
from app.core.exceptions import DegenerateTriangle, InvalidGeometry, NonConvergence
from app.geometry import BoundaryLoop, PiecewiseConstantCircleMap, SampledCircleMap
from app.plateau import (
    BoundaryData,
    DiscreteMap,
    DiskMesh,
    PlateauOptions,
    analyze_loop,
    boundary_nodes,
    bouquet_competitor,
    cone_extension,
    discrete_jacobian_mass,
    lipschitz_transfer,
    loop_boundary_data,
    plateau_certify,
    plateau_closed_form,
    plateau_lower,
    plateau_relaxed,
    plateau_upper,
    smoothed_mass,
    tilde_gamma,
)
from app.plateau import optimizer as optimizer_module
from app.scene.library import double_butterfly_values, five_point_values

TRIANGLE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]

A1, A2, A3, A4, A5 = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-2.0, 0.0), (0.0, -2.0)
DOUBLE_EIGHT = [A1, A2, A3, A1, A4, A5, A1, A3, A2, A1, A5, A4]

FAST = dict(n_rings=8, n_angular=48, max_iters=100, jitter_starts=0, smoothing=[1e-2, 1e-4])


def regular_polygon(n: int, radius: float = 1.0) -> BoundaryLoop:
    theta = np.arange(n) * (2.0 * math.pi / n)
    return BoundaryLoop(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


def unit_circle(theta):
    return np.column_stack([np.cos(theta), np.sin(theta)])


@pytest.fixture
def settings_override(monkeypatch):
    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(key, str(value))
        get_settings.cache_clear()

    yield apply
    get_settings.cache_clear()


@pytest.fixture
def triangle_loop():
    return BoundaryLoop.from_points(TRIANGLE)


@pytest.fixture
def double_eight():
    return BoundaryLoop.from_points(DOUBLE_EIGHT)


# ----------------------------------------------------------------------------
# γ ↦ γ̃
# ----------------------------------------------------------------------------

def test_tilde_gamma_triple_point_is_the_triangle():
    loop = tilde_gamma(PiecewiseConstantCircleMap.uniform(TRIANGLE))
    assert loop.n_vertices == 3
    assert loop.length == pytest.approx(2.0 + math.sqrt(2.0))


def test_tilde_gamma_of_constant_data_is_a_point():
    loop = tilde_gamma(PiecewiseConstantCircleMap.uniform([(0.3, -0.2)]))
    assert loop.n_vertices == 1
    assert loop.length == 0.0


def test_tilde_gamma_collapses_repeated_consecutive_values():
    gamma = PiecewiseConstantCircleMap.uniform([(0, 0), (0, 0), (1, 0), (0, 1), (0, 0)])
    assert tilde_gamma(gamma).n_vertices == 3


def test_tilde_gamma_keeps_double_butterfly_vertices():
    loop = tilde_gamma(PiecewiseConstantCircleMap.uniform(double_butterfly_values()))
    assert loop.n_vertices == 12


# ----------------------------------------------------------------------------
# lower bound
# ----------------------------------------------------------------------------

def test_lower_bound_regular_polygon_close_to_pi():
    assert plateau_lower(regular_polygon(256)) == pytest.approx(math.pi, abs=5e-3)


def test_lower_bound_triangle(triangle_loop):
    assert plateau_lower(triangle_loop) == pytest.approx(0.5, abs=1e-6)


def test_lower_bound_double_eight_is_zero(double_eight):
    assert plateau_lower(double_eight) == pytest.approx(0.0, abs=1e-9)


def test_lower_bound_of_degenerate_loops_is_zero():
    assert plateau_lower(BoundaryLoop.from_points([(1.0, 1.0)])) == 0.0
    assert plateau_lower(BoundaryLoop.from_points([(0.0, 0.0), (1.0, 0.0)])) == 0.0


# ----------------------------------------------------------------------------
# meshes and boundary data
# ----------------------------------------------------------------------------

def test_polar_mesh_layout():
    mesh = DiskMesh.polar(4, 16)
    assert mesh.n_vertices == 1 + 4 * 16
    assert len(mesh.triangles) == 16 + 2 * 16 * 3
    assert len(mesh.boundary_vertices) == 16
    assert len(mesh.interior_vertices) == 1 + 3 * 16
    assert np.allclose(np.hypot(*mesh.vertices[mesh.boundary_vertices].T), 1.0)


def test_polar_mesh_triangles_are_positively_oriented():
    mesh = DiskMesh.polar(3, 12)
    assert np.all(mesh.triangle_areas > 0.0)
    assert mesh.triangle_areas.sum() == pytest.approx(6.0 * math.sin(2.0 * math.pi / 12))


def test_mesh_rejects_gap_of_half_a_turn():
    with pytest.raises(InvalidGeometry):
        DiskMesh([1.0], [0.0, 0.1, math.pi + 0.2])


def test_boundary_data_refinement_keeps_the_function():
    data = BoundaryData([0.0, 2.0, 4.0], [(0, 0), (1, 0), (0, 1)])
    fine = data.refined(0.25)
    assert fine.gaps().max() <= 0.25 + 1e-12
    theta = np.linspace(0.0, 2.0 * math.pi, 77)
    assert np.allclose(fine.evaluate(theta), data.evaluate(theta))


def test_loop_boundary_data_contains_every_vertex(triangle_loop):
    data = loop_boundary_data(triangle_loop, 32)
    for vertex in TRIANGLE:
        assert np.any(np.all(data.values == np.array(vertex), axis=1))
    assert data.gaps().max() <= 2.0 * math.pi / 32 + 1e-12


def test_boundary_nodes_keeps_sampled_nodes():
    circle = SampledCircleMap.from_function(unit_circle, 64)
    data = boundary_nodes(circle, 32)
    assert data.n_nodes == 64
    assert np.array_equal(data.values, circle.values)


def test_cone_extension_rejects_coarse_samples():
    circle = SampledCircleMap.from_function(unit_circle, 16)
    with pytest.raises(InvalidGeometry):
        cone_extension(circle, DiskMesh.polar(2, 32))


# ----------------------------------------------------------------------------
# discrete Jacobian mass
# ----------------------------------------------------------------------------

def test_identity_mass_is_mesh_area():
    mesh = DiskMesh.polar(5, 40)
    identity = DiscreteMap(mesh, mesh.vertices)
    assert discrete_jacobian_mass(identity) == pytest.approx(mesh.triangle_areas.sum(), rel=1e-12)


def test_constant_map_has_zero_mass():
    mesh = DiskMesh.polar(3, 24)
    constant = DiscreteMap(mesh, np.tile([2.0, -1.0], (mesh.n_vertices, 1)))
    assert discrete_jacobian_mass(constant) == 0.0


def test_map_into_a_line_has_zero_mass():
    mesh = DiskMesh.polar(3, 24)
    t = np.random.default_rng(7).normal(size=mesh.n_vertices)
    assert discrete_jacobian_mass(DiscreteMap(mesh, np.column_stack([t, 2.0 * t]))) == 0.0


def test_degenerate_source_triangle_raises(settings_override):
    settings_override(DEGENERATE_TRIANGLE_AREA=1.0)
    mesh = DiskMesh.polar(2, 16)
    with pytest.raises(DegenerateTriangle):
        discrete_jacobian_mass(DiscreteMap(mesh, mesh.vertices))


def test_discrete_map_rejects_wrong_shape():
    mesh = DiskMesh.polar(2, 8)
    with pytest.raises(InvalidGeometry):
        DiscreteMap(mesh, np.zeros((mesh.n_vertices - 1, 2)))


def test_cone_extension_of_constant_data_is_rho_times_constant():
    mesh = DiskMesh.polar(4, 16)
    cone = cone_extension(np.tile([0.4, 0.7], (16, 1)), mesh)
    rho = np.hypot(*mesh.vertices.T)
    assert np.allclose(cone.values, rho[:, None] * np.array([0.4, 0.7]))


def test_cone_extension_of_degree_two_covers_the_disk_twice():
    circle = SampledCircleMap.from_function(lambda t: unit_circle(2.0 * t), 256)
    mesh = DiskMesh.polar(6, 256)
    assert discrete_jacobian_mass(cone_extension(circle, mesh)) >= 2.0 * math.pi * (1.0 - 1e-2)


def test_smoothed_mass_gradient_matches_finite_differences():
    mesh = DiskMesh.polar(2, 8)
    rng = np.random.default_rng(3)
    values = mesh.vertices + 0.1 * rng.normal(size=mesh.vertices.shape)
    f, grad = smoothed_mass(values, mesh, 1e-2)
    assert f <= discrete_jacobian_mass(DiscreteMap(mesh, values))
    h = 1e-6
    for vertex, axis in [(0, 0), (3, 1), (12, 0)]:
        up, down = values.copy(), values.copy()
        up[vertex, axis] += h
        down[vertex, axis] -= h
        numeric = (smoothed_mass(up, mesh, 1e-2)[0] - smoothed_mass(down, mesh, 1e-2)[0]) / (2 * h)
        assert grad[vertex, axis] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


# ----------------------------------------------------------------------------
# polar-parameter evaluation
# ----------------------------------------------------------------------------

@pytest.fixture
def jittered_map():
    mesh = DiskMesh.polar(3, 12)
    rng = np.random.default_rng(11)
    return DiscreteMap(mesh, mesh.vertices + 0.05 * rng.normal(size=mesh.vertices.shape))


def test_evaluate_reproduces_vertex_values(jittered_map):
    mesh = jittered_map.mesh
    # nudge inward so boundary vertices do not clamp onto a neighbouring cell
    points = mesh.vertices[1:] * (1.0 - 1e-12)
    assert np.allclose(jittered_map.evaluate(points), jittered_map.values[1:], atol=1e-9)


def test_evaluate_on_the_circle_matches_boundary_data(jittered_map):
    theta = np.linspace(0.0, 2.0 * math.pi, 101, endpoint=False)
    points = 3.0 * unit_circle(theta) + np.array([1.0, -2.0])
    got = jittered_map.evaluate(points, center=(1.0, -2.0), scale=3.0)
    assert np.allclose(got, jittered_map.boundary_data().evaluate(theta), atol=1e-12)


def test_evaluate_clamps_outside_the_disk(jittered_map):
    theta = np.array([0.3, 2.0, 4.0])
    assert np.allclose(jittered_map.evaluate(5.0 * unit_circle(theta)),
                       jittered_map.evaluate(unit_circle(theta)))


def test_gradient_matches_finite_differences(jittered_map):
    rng = np.random.default_rng(5)
    rho = rng.uniform(0.1, 0.9, 20)
    theta = rng.uniform(0.0, 2.0 * math.pi, 20)
    points = rho[:, None] * unit_circle(theta)
    grad = jittered_map.gradient(points)
    h = 1e-7
    for k, p in enumerate(points):
        for axis in range(2):
            step = np.zeros(2)
            step[axis] = h
            numeric = (jittered_map.evaluate([p + step]) - jittered_map.evaluate([p - step]))[0] / (2 * h)
            # a stencil straddling a cell edge falls back to one-sided differences
            if np.allclose(numeric, grad[k][:, axis], atol=1e-4):
                continue
            left = (jittered_map.evaluate([p]) - jittered_map.evaluate([p - step]))[0] / h
            right = (jittered_map.evaluate([p + step]) - jittered_map.evaluate([p]))[0] / h
            assert np.allclose(left, grad[k][:, axis], atol=1e-4) or np.allclose(right, grad[k][:, axis], atol=1e-4)


def test_lipschitz_constant_bounds_the_gradient(jittered_map):
    rng = np.random.default_rng(9)
    rho = np.sqrt(rng.uniform(0.0, 1.0, 500))
    points = rho[:, None] * unit_circle(rng.uniform(0.0, 2.0 * math.pi, 500))
    norms = np.sqrt(np.sum(jittered_map.gradient(points) ** 2, axis=(1, 2)))
    assert norms.max() <= jittered_map.lipschitz_constant() * (1.0 + 1e-9)


def test_identity_lipschitz_constant_is_modest():
    mesh = DiskMesh.polar(6, 64)
    assert 1.0 <= DiscreteMap(mesh, mesh.vertices).lipschitz_constant() < 2.5


def test_pieces_cover_the_scaled_disk(jittered_map):
    pieces = jittered_map.pieces(center=(2.0, 1.0), scale=0.5)
    mesh = jittered_map.mesh
    assert len(pieces) == mesh.n_angular * (1 + 2 * (mesh.n_rings - 1))
    assert sum(p.area for p in pieces) == pytest.approx(math.pi * 0.25, rel=1e-12)


# ----------------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------------

def test_closed_form_triangle(triangle_loop):
    assert plateau_closed_form(triangle_loop) == pytest.approx(0.5)
    assert plateau_closed_form(triangle_loop.reversed()) == pytest.approx(0.5)


def test_closed_form_square_traversed_twice():
    structure = analyze_loop(BoundaryLoop.from_points(UNIT_SQUARE).repeated(2))
    assert structure.kind == "power"
    assert structure.value == pytest.approx(2.0)


def test_closed_form_degree_three_polygon():
    polygon = regular_polygon(64)
    assert plateau_closed_form(polygon.repeated(3)) == pytest.approx(3.0 * abs(polygon.signed_area()))


def test_closed_form_double_eight_is_twice_the_small_petal(double_eight):
    structure = analyze_loop(double_eight)
    assert structure.kind == "commutator"
    assert structure.value == pytest.approx(1.0)


def test_closed_form_petal_and_its_inverse_is_contractible():
    structure = analyze_loop(BoundaryLoop.from_points([A1, A2, A3, A1, A3, A2]))
    assert structure.kind == "contractible"
    assert structure.value == 0.0


def test_closed_form_figure_eight_pair_adds_petals():
    # both petals counterclockwise: a·b
    structure = analyze_loop(BoundaryLoop.from_points([A1, A2, A3, A1, A4, A5]))
    assert structure.kind == "power-pair"
    assert structure.value == pytest.approx(2.5)


def test_closed_form_self_crossing_loop_is_unrecognized():
    bow_tie = BoundaryLoop.from_points([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert plateau_closed_form(bow_tie) is None
    assert plateau_closed_form(BoundaryLoop(five_point_values())) is None


def test_closed_form_degenerate_loops():
    assert plateau_closed_form(BoundaryLoop.from_points([(0, 0), (1, 0)])) == 0.0


# ----------------------------------------------------------------------------
# constructive competitor
# ----------------------------------------------------------------------------

def test_bouquet_competitor_double_eight(double_eight):
    data = loop_boundary_data(double_eight, 96)
    competitor = bouquet_competitor(data)
    assert competitor is not None
    assert competitor.jacobian_mass() == pytest.approx(1.0, abs=1e-9)
    assert np.array_equal(competitor.boundary_values(), data.values)


def test_bouquet_competitor_ignores_jordan_loops(triangle_loop):
    assert bouquet_competitor(loop_boundary_data(triangle_loop, 32)) is None


# ----------------------------------------------------------------------------
# upper bound
# ----------------------------------------------------------------------------

def test_upper_bound_triangle(triangle_loop):
    upper = plateau_upper(triangle_loop, PlateauOptions(n_rings=24, max_iters=100, jitter_starts=1))
    assert 0.5 - 1e-9 <= upper.mass <= 0.5 * 1.01
    assert np.array_equal(upper.competitor.boundary_values(), loop_boundary_data(triangle_loop, 96).values)


def test_upper_bound_circle():
    circle = SampledCircleMap.from_function(unit_circle, 256)
    options = PlateauOptions(n_rings=32, max_iters=50, jitter_starts=0)
    mass, competitor = plateau_upper(circle, options)
    assert mass == pytest.approx(math.pi, rel=3e-2)
    assert competitor.mesh.n_rings == 32


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_bounds_for_repeated_circle(degree):
    loop = regular_polygon(256).repeated(degree)

    upper = plateau_upper(loop, PlateauOptions(n_rings=32, max_iters=50, jitter_starts=0))

    assert upper.mass == pytest.approx(degree * math.pi, rel=3e-2)
    assert plateau_lower(loop) == pytest.approx(degree * math.pi, rel=5e-3)


def test_upper_bound_double_eight_uses_constructive_competitor(double_eight):
    upper = plateau_upper(double_eight, PlateauOptions(optimize="never"))
    assert upper.mass <= 1.02
    assert upper.method == "constructive"
    assert "cone" in upper.candidates and "constructive" in upper.candidates


def test_upper_bound_never_reports_the_cone(triangle_loop):
    upper = plateau_upper(triangle_loop, PlateauOptions(optimize="never", n_rings=6))
    assert upper.method == "coneExtension"
    assert upper.iterations == 0
    assert upper.mass == pytest.approx(0.5, abs=1e-12)


def test_upper_bound_is_deterministic_for_a_seed():
    loop = BoundaryLoop(five_point_values())
    first = plateau_upper(loop, PlateauOptions(**{**FAST, "jitter_starts": 1}))
    second = plateau_upper(loop, PlateauOptions(**{**FAST, "jitter_starts": 1}))
    assert first.mass == second.mass
    assert np.array_equal(first.competitor.values, second.competitor.values)


def test_upper_bound_strict_raises_on_non_convergence(monkeypatch):
    def stuck(fun, x0, max_iters):
        return x0, max_iters, False

    monkeypatch.setattr(optimizer_module, "_lbfgs", stuck)
    loop = BoundaryLoop(five_point_values())
    with pytest.raises(NonConvergence):
        plateau_upper(loop, PlateauOptions(**FAST, strict=True))
    upper = plateau_upper(loop, PlateauOptions(**FAST))
    assert upper.converged is False


def test_still_improving_tracks_recent_decrease():
    falling = [1.0 - 1e-3 * i for i in range(20)]
    flat = [0.5] * 20

    assert optimizer_module._still_improving(falling)
    assert not optimizer_module._still_improving(flat)
    assert not optimizer_module._still_improving(falling[:5])


def test_upper_bound_threads_match_serial():
    loop = BoundaryLoop(five_point_values())
    serial = plateau_upper(loop, PlateauOptions(**{**FAST, "jitter_starts": 1}))
    threaded = plateau_upper(loop, PlateauOptions(**{**FAST, "jitter_starts": 1, "workers": 3}))
    assert threaded.mass == serial.mass


# ----------------------------------------------------------------------------
# options
# ----------------------------------------------------------------------------

def test_options_default_from_settings():
    options = PlateauOptions()
    settings = get_settings()
    assert options.n_rings == settings.MESH_RINGS
    assert options.seed == settings.DEFAULT_SEED


def test_options_sort_smoothing_schedule():
    assert PlateauOptions(smoothing=[1e-4, 1e-1, 1e-2]).smoothing == [1e-1, 1e-2, 1e-4]


@pytest.mark.parametrize("bad", [
    {"n_angular": 4},
    {"smoothing": []},
    {"smoothing": [0.1, -1.0]},
    {"method": "newton"},
    {"seed": -1},
    {"unknown": 1},
])
def test_options_reject_invalid_values(bad):
    with pytest.raises(ValueError):
        PlateauOptions(**bad)


# ----------------------------------------------------------------------------
# certificates
# ----------------------------------------------------------------------------

def test_certify_triangle(triangle_loop):
    cert = plateau_certify(triangle_loop)
    assert cert.upper_method == "closedForm"
    assert cert.upper == pytest.approx(0.5)
    assert cert.lower == pytest.approx(0.5, abs=1e-6)
    assert cert.lower <= cert.upper + 1e-9
    assert cert.is_exact


def test_certify_degree_three_circle():
    polygon = regular_polygon(256)
    cert = plateau_certify(polygon.repeated(3))
    assert cert.closed_form_kind == "power"
    assert cert.value == pytest.approx(3.0 * math.pi, rel=1e-3)
    assert cert.lower == pytest.approx(cert.upper, abs=1e-5)


def test_certify_double_eight(double_eight):
    cert = plateau_certify(double_eight)
    assert cert.lower == pytest.approx(0.0, abs=1e-9)
    assert cert.upper == pytest.approx(1.0)
    assert cert.closed_form_kind == "commutator"
    assert cert.gap == pytest.approx(1.0, abs=1e-6)


def test_certify_unrecognized_loop_runs_the_optimizer():
    cert = plateau_certify(BoundaryLoop(five_point_values()), PlateauOptions(**FAST))
    assert cert.closed_form is None
    assert cert.upper_method in ("coneExtension", "meshOptimizer")
    assert cert.lower <= cert.upper + 1e-9
    assert cert.mesh_stats["rings"] == FAST["n_rings"]


def test_certificate_record(triangle_loop):
    record = plateau_certify(triangle_loop).to_record("triangle")
    assert record.name == "triangle"
    assert record.upper_method == "closedForm"
    assert record.closed_form == pytest.approx(0.5)


def test_relaxed_triple_point():
    cert = plateau_relaxed(PiecewiseConstantCircleMap.uniform(TRIANGLE))
    assert cert.value == pytest.approx(0.5)


def test_relaxed_constant_data_is_zero():
    cert = plateau_relaxed(PiecewiseConstantCircleMap.uniform([(1.0, 2.0)]))
    assert cert.upper == 0.0
    assert cert.lower == 0.0


def test_relaxed_double_butterfly():
    cert = plateau_relaxed(PiecewiseConstantCircleMap.uniform(double_butterfly_values()))
    assert cert.value == pytest.approx(1.0)


# ----------------------------------------------------------------------------
# invariances
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("factor", [0.4, 2.5])
def test_rescaling_scales_bounds_quadratically(factor):
    loop = BoundaryLoop(five_point_values())
    base = plateau_certify(loop, PlateauOptions(**FAST))
    scaled = plateau_certify(loop.transformed(scale=factor), PlateauOptions(**FAST))
    assert scaled.lower == pytest.approx(factor ** 2 * base.lower, abs=1e-5 * max(1.0, factor ** 2))
    assert scaled.upper == pytest.approx(factor ** 2 * base.upper, rel=1e-3)


def test_rescaling_closed_form(double_eight):
    assert plateau_closed_form(double_eight.transformed(scale=3.0, rotation=0.7, shift=(1, 2))) == \
        pytest.approx(9.0)


@pytest.mark.parametrize("seed", range(20))
def test_reparametrization_leaves_upper_bound_unchanged(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0.0, 0.75), rng.uniform(0.0, 2.0 * math.pi)
    circle = SampledCircleMap.from_function(unit_circle, 256)
    warped = circle.reparametrized(lambda t: t + a * np.sin(t + b))
    options = PlateauOptions(optimize="never", n_rings=8, n_angular=64)
    base = plateau_upper(circle, options).mass
    assert plateau_upper(warped, options).mass == pytest.approx(base, rel=2e-2)


def random_convex_pair(rng: np.random.Generator):
    n = int(rng.integers(3, 9))
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
    verts = unit_circle(angles)
    other = (1.0 + rng.uniform(-0.2, 0.2)) * verts + rng.uniform(-0.1, 0.1, size=2)
    return BoundaryLoop(verts), BoundaryLoop(other)


def test_lipschitz_bound_on_convex_pairs():
    rng = np.random.default_rng(2024)
    mesh = DiskMesh.polar(4, 64)
    fractions = mesh.angles / (2.0 * math.pi)
    for _ in range(100):
        loop1, loop2 = random_convex_pair(rng)
        distance = float(np.max(np.hypot(*(loop1.vertices - loop2.vertices).T)))
        lengths = loop1.length + loop2.length
        area1, area2 = abs(loop1.signed_area()), abs(loop2.signed_area())
        assert abs(area1 - area2) <= 2.0 * distance * lengths + 1e-12

        phi1, phi2 = loop1.point_at_fraction(fractions), loop2.point_at_fraction(fractions)
        competitor = cone_extension(phi2, mesh, apex=phi2.mean(axis=0))
        transfer = lipschitz_transfer(competitor, phi1)
        assert np.array_equal(transfer.boundary_values(), phi1)
        node_distance = float(np.max(np.hypot(*(phi1 - phi2).T)))
        assert transfer.jacobian_mass() <= competitor.jacobian_mass() + 2.0 * node_distance * lengths + 1e-12
        shoelace = 0.5 * abs(np.dot(phi1[:, 0], np.roll(phi1[:, 1], -1)) - np.dot(np.roll(phi1[:, 0], -1), phi1[:, 1]))
        assert transfer.jacobian_mass() >= shoelace - 1e-12


@pytest.mark.parametrize("delta", [1e-2, 1e-3])
def test_closed_form_is_continuous_in_the_vertices(triangle_loop, delta):
    rng = np.random.default_rng(42)
    perimeter = triangle_loop.length
    for _ in range(10):
        moved = BoundaryLoop(triangle_loop.vertices + delta * rng.uniform(-1.0, 1.0, size=(3, 2)))
        assert abs(plateau_closed_form(moved) - 0.5) <= 2.0 * perimeter * delta
