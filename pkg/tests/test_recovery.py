import math

import numpy as np
import pytest

from app.core.exceptions import BoundaryMismatch, InvalidGeometry, InvalidScene, WindowOverlap
from app.geometry import AffineMap, PiecewiseConstantCircleMap, area_density, patch_nodes, quadrature_2d
from app.plateau import PlateauOptions, plateau_upper
from app.recovery import (
    area_convergence_check,
    fitted_rate,
    gamma_k,
    graph_area,
    l1_distance,
    n_uple_recovery,
    n_uple_sequence,
    recovery_report,
    recovery_tv,
    straight_jump_recovery,
    straight_jump_sequence,
    strict_convergence_check,
    window_mask,
)
from app.relaxation import n_uple_point_area, relaxed_area_bv
from app.scene import n_uple_scene, straight_jump_scene, triple_point_scene

TRIANGLE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
TRIANGLE_JUMPS = 2.0 + math.sqrt(2.0)
TRIPLE_AREA = math.pi + TRIANGLE_JUMPS + 0.5
EPS_SCHEDULE = (1e-1, 1e-2, 1e-3)
K_SCHEDULE = (10, 40, 160)
NEVER = dict(optimize="never", jitter_starts=0)


@pytest.fixture
def triangle_gamma():
    return PiecewiseConstantCircleMap.uniform(TRIANGLE)


@pytest.fixture
def jump_scene():
    return straight_jump_scene(0.0, 1.0, upper=(1.0, 0.0), lower=(0.0, 0.0))


@pytest.fixture(scope="module")
def triple_sequence():
    gamma = PiecewiseConstantCircleMap.uniform(TRIANGLE)
    return n_uple_sequence(gamma, 1.0, K_SCHEDULE, PlateauOptions(**NEVER))


# ----------------------------------------------------------------------------
# γ_k
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("k", [10, 100, 1000])
def test_gamma_k_preserves_total_variation(triangle_gamma, k):
    assert gamma_k(triangle_gamma, k).total_variation() == pytest.approx(TRIANGLE_JUMPS, abs=1e-12)


def test_gamma_k_total_variation_of_uneven_arcs():
    gamma = PiecewiseConstantCircleMap([(0.0, 0.0), (2.0, 0.0), (0.0, 3.0), (-1.0, 1.0)],
                                       [1.0, 2.0, 1.5, 2.0 * math.pi - 4.5], start_angle=0.7)
    assert gamma_k(gamma, 25).total_variation() == pytest.approx(gamma.jump_length(), abs=1e-12)


def test_gamma_k_agrees_with_gamma_outside_the_windows(triangle_gamma):
    k = 40
    profile = gamma_k(triangle_gamma, k)
    theta = np.linspace(0.0, 2.0 * math.pi, 5001, endpoint=False)
    outside = ~window_mask(triangle_gamma, k, theta)

    assert outside.sum() > 4000
    assert np.allclose(profile.evaluate(theta[outside]), triangle_gamma.evaluate(theta[outside]), atol=1e-12)


def test_gamma_k_takes_the_midpoint_at_each_jump(triangle_gamma):
    profile = gamma_k(triangle_gamma, 20)
    values = np.array(TRIANGLE)
    for k, angle in enumerate(triangle_gamma.breakpoints()):
        expected = 0.5 * (values[k - 1] + values[k])
        assert np.allclose(profile.evaluate([angle])[0], expected, atol=1e-12)


def test_gamma_k_of_constant_data_is_constant():
    gamma = PiecewiseConstantCircleMap([(2.0, -1.0)], [2.0 * math.pi])
    profile = gamma_k(gamma, 5)
    assert np.all(profile.values == np.array([2.0, -1.0]))
    assert profile.total_variation() == 0.0


def test_gamma_k_with_two_values_has_enough_nodes():
    gamma = PiecewiseConstantCircleMap.uniform([(0.0, 0.0), (1.0, 1.0)])
    profile = gamma_k(gamma, 10)
    assert profile.n_samples >= 8
    assert profile.total_variation() == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-12)


def test_gamma_k_rejects_overlapping_windows():
    gamma = PiecewiseConstantCircleMap([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
                                       [0.1, math.pi - 0.05, math.pi - 0.05])
    with pytest.raises(WindowOverlap):
        gamma_k(gamma, 10)
    assert gamma_k(gamma, 21).n_samples >= 8


# ----------------------------------------------------------------------------
# straight jump
# ----------------------------------------------------------------------------

def test_strip_map_interpolates_between_the_traces(jump_scene):
    eps = 0.05
    v = straight_jump_recovery(jump_scene, eps)
    t = np.linspace(0.1, 0.9, 9)

    assert np.allclose(v.evaluate(np.column_stack([t, np.full(9, eps)])), [1.0, 0.0])
    assert np.allclose(v.evaluate(np.column_stack([t, np.full(9, -eps)])), [0.0, 0.0])
    assert np.allclose(v.evaluate(np.column_stack([t, np.zeros(9)])), [0.5, 0.0])


def test_strip_map_equals_u_outside_the_strip(jump_scene):
    eps = 0.1
    rng = np.random.default_rng(3)
    pts = np.column_stack([rng.uniform(0.0, 1.0, 500), rng.uniform(eps, 1.0, 500) * rng.choice([-1, 1], 500)])
    v = straight_jump_recovery(jump_scene, eps)
    assert np.array_equal(v.evaluate(pts), jump_scene.evaluate(pts))


def test_strip_map_gradient_across_the_strip(jump_scene):
    eps = 1e-2
    v = straight_jump_recovery(jump_scene, eps)
    grad = v.gradient(np.array([[0.3, 0.0], [0.7, 0.004], [0.5, -0.009]]))

    assert np.allclose(grad[:, :, 1], [1.0 / (2.0 * eps), 0.0])
    assert np.allclose(grad[:, :, 0], 0.0)


def test_strip_map_is_continuous_for_affine_traces():
    upper = AffineMap([[1.0, 0.5], [0.0, 2.0]], (0.0, 1.0))
    lower = AffineMap([[0.0, 1.0], [-1.0, 0.0]], (0.0, 0.0))
    v = straight_jump_recovery(straight_jump_scene(0.0, 2.0, upper, lower), 0.2)
    t = np.linspace(0.0, 2.0, 11)
    for sigma in (0.2, -0.2):
        inside = np.column_stack([t, np.full(11, sigma * (1.0 - 1e-12))])
        outside = np.column_stack([t, np.full(11, sigma * (1.0 + 1e-12))])
        assert np.allclose(v.evaluate(inside), v.evaluate(outside), atol=1e-9)


def test_strip_map_pieces_tile_the_rectangle(jump_scene):
    v = straight_jump_recovery(jump_scene, 0.25)
    assert sum(p.area for p in v.pieces()) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("eps", [0.0, -0.1, 1.0])
def test_strip_map_rejects_invalid_widths(jump_scene, eps):
    with pytest.raises(InvalidGeometry):
        straight_jump_recovery(jump_scene, eps)


def test_strip_map_needs_a_straight_jump_scene():
    with pytest.raises(InvalidScene):
        straight_jump_recovery(triple_point_scene(TRIANGLE), 0.1)


def test_strip_l1_distance_is_a_quarter_strip(jump_scene):
    for eps in EPS_SCHEDULE:
        v = straight_jump_recovery(jump_scene, eps)
        assert l1_distance(v, jump_scene) == pytest.approx(0.5 * eps, abs=1e-9)


def test_straight_jump_strict_convergence(jump_scene):
    report = strict_convergence_check(straight_jump_sequence(jump_scene, EPS_SCHEDULE), jump_scene)

    assert list(report.table["parameter"]) == list(EPS_SCHEDULE)
    assert report.final["tv_gap"] < 5e-3
    assert report.flags == {"l1_gap": True, "tv_gap": True, "slice_gap": True}
    assert report.rates["l1_gap"] == pytest.approx(1.0, abs=1e-3)


def test_straight_jump_area_convergence(jump_scene):
    formula = relaxed_area_bv(jump_scene).total
    report = area_convergence_check(straight_jump_sequence(jump_scene, EPS_SCHEDULE), formula)

    assert formula == pytest.approx(3.0, abs=1e-9)
    gaps = report.table["area_gap"].to_numpy()
    expected = [abs(math.sqrt(4.0 * e * e + 1.0) - 1.0 - 2.0 * e) for e in EPS_SCHEDULE]
    assert gaps == pytest.approx(expected, abs=1e-8)
    assert gaps[-1] <= 5e-3
    assert report.monotone("area_gap")
    assert 0.9 < report.rate < 1.1


def test_smooth_map_sequence_has_no_gaps():
    smooth = AffineMap([[1.0, 0.5], [0.0, 2.0]], (0.0, 0.0))
    scene = straight_jump_scene(0.0, 1.0, smooth, smooth)
    expected_area = 2.0 * float(area_density(smooth.gradient(np.zeros((1, 2))))[0])

    report = recovery_report(straight_jump_sequence(scene, (0.5, 0.05)), scene, expected_area)

    assert report.table["l1_gap"].max() < 1e-12
    assert report.table["tv_gap"].max() < 1e-9
    assert report.table["slice_gap"].max() < 1e-9
    assert report.table["area_gap"].max() < 1e-9


def test_recovery_report_columns(jump_scene):
    report = recovery_report(straight_jump_sequence(jump_scene, (0.1, 0.01)), jump_scene, 3.0)
    assert list(report.table.columns) == ["parameter", "l1_gap", "tv_gap", "slice_gap", "area_gap", "area"]
    assert "non-increasing" in report.summary()


def test_fitted_rate():
    scales = [1e-1, 1e-2, 1e-3]
    assert fitted_rate(scales, [2.0 * s * s for s in scales]) == pytest.approx(2.0)
    assert fitted_rate(scales, [0.0, 0.0, 1e-3]) is None


# ----------------------------------------------------------------------------
# n-uple points
# ----------------------------------------------------------------------------

def test_n_uple_recovery_radius_rule(triple_sequence):
    for recovery in triple_sequence:
        c_k = recovery.competitor.lipschitz_constant()
        assert recovery.lipschitz == c_k
        assert recovery.rho == pytest.approx(min(0.5, 1.0 / (recovery.k * max(1.0, c_k))))
        assert recovery.lipschitz * recovery.rho <= 1.0 / recovery.k + 1e-15


def test_n_uple_recovery_matches_gamma_k_on_the_boundary(triple_sequence):
    recovery = triple_sequence[0]
    theta = np.linspace(0.0, 2.0 * math.pi, 257)[:-1]
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    assert np.allclose(recovery.evaluate(circle), recovery.profile.evaluate(theta), atol=1e-12)


def test_n_uple_recovery_is_continuous_across_the_inner_circle(triple_sequence):
    recovery = triple_sequence[0]
    theta = np.linspace(0.0, 2.0 * math.pi, 97)[:-1]
    direction = np.column_stack([np.cos(theta), np.sin(theta)])
    inside = recovery.evaluate(recovery.rho * (1.0 - 1e-12) * direction)
    outside = recovery.evaluate(recovery.rho * (1.0 + 1e-12) * direction)
    assert np.allclose(inside, outside, atol=1e-8)


def _annulus_patches(recovery):
    return [patch for piece in recovery.annulus_pieces() for patch in piece.patches()]


def test_n_uple_jacobian_vanishes_on_the_annulus(triple_sequence):
    for recovery in triple_sequence:
        pts, _ = patch_nodes(_annulus_patches(recovery))
        grad = recovery.gradient(pts)

        assert np.max(np.abs(grad)) > 1.0
        assert np.max(np.abs(recovery.jacobian(pts))) < 1e-10


def test_n_uple_jacobian_on_the_annulus_is_rounding_only():
    gamma = PiecewiseConstantCircleMap.uniform([(0.0, 0.0), (2.0, 0.5), (0.3, 1.7)])
    recovery = n_uple_sequence(gamma, 1.0, (10,), PlateauOptions(**NEVER))[0]
    pts, _ = patch_nodes(_annulus_patches(recovery))
    grad = recovery.gradient(pts)
    scale = 1.0 + np.einsum("mij,mij->m", grad, grad)

    assert np.all(np.abs(recovery.jacobian(pts)) <= 1e-12 * scale)


def test_n_uple_inner_variation_is_bounded_by_c_rho(triple_sequence):
    for recovery in triple_sequence:
        patches = [p for piece in recovery.competitor.pieces(recovery.center, recovery.rho) for p in piece.patches()]
        inner = quadrature_2d(patches, recovery.gradient_norm, 1e-10)
        assert inner <= math.pi * recovery.lipschitz * recovery.rho * (1.0 + 1e-6)


def test_n_uple_recovery_rejects_a_foreign_competitor(triangle_gamma):
    competitor = plateau_upper(gamma_k(triangle_gamma, 10), PlateauOptions(**NEVER)).competitor
    with pytest.raises(BoundaryMismatch):
        n_uple_recovery(triangle_gamma, 1.0, 40, competitor)


def test_triple_point_strict_convergence(triple_sequence, triangle_gamma):
    scene = n_uple_scene(triangle_gamma, 1.0)
    report = strict_convergence_check(triple_sequence, scene)
    l1 = report.table["l1_gap"].to_numpy()

    assert np.all(l1[1:] <= 0.5 * l1[:-1])
    assert report.final["tv_gap"] < 1e-3
    assert report.final["slice_gap"] < 1e-9
    assert report.rates["l1_gap"] == pytest.approx(1.0, abs=0.1)


def test_triple_point_area_convergence(triple_sequence, triangle_gamma):
    formula = n_uple_point_area(triangle_gamma).total
    area = graph_area(triple_sequence[-1])

    assert formula == pytest.approx(TRIPLE_AREA, abs=1e-9)
    assert area == pytest.approx(formula, rel=2e-2)
    assert area >= math.pi + TRIANGLE_JUMPS - 1e-3


def test_two_valued_recovery_has_no_junction_cost():
    gamma = PiecewiseConstantCircleMap.uniform([(0.0, 0.0), (1.0, 0.0)])
    (recovery,) = n_uple_sequence(gamma, 1.0, [10], PlateauOptions(**NEVER))

    assert recovery.competitor.jacobian_mass() == pytest.approx(0.0, abs=1e-12)
    assert graph_area(recovery) == pytest.approx(math.pi + 2.0, rel=2e-2)
    assert recovery_tv(recovery) == pytest.approx(2.0, abs=1e-2)
