"""Level sets, splittings, reduced structures and the verification pipelines."""

import numpy as np
import pytest

from symred.actions import GroupAction, MomentumMap, uniform_circle_quadrature
from symred.errors import (
    ActionNotFreeError,
    NoConvergenceError,
    NotOnLevelError,
    NotRegularValueError,
    RankDeficientLiftError,
    SectionNotOnLevelError,
    VerticalLeakWarning,
)
from symred.geometry import ChartPoint, FDConfig, TensorField, eval_field
from symred.reduction import (
    ReductionScenario,
    check_vertical_ad_invariance,
    project_to_level,
    reduced_acs,
    reduced_metric,
    reduced_structures,
    reduced_symplectic,
    sample_quotient_points,
    split_tangent,
    verify_main_theorem,
    verify_reduction_identity,
    verify_submersion,
)
from symred.scenarios import builtin
from symred.structures import euclidean_metric, standard_acs, standard_acs_matrix, standard_symplectic

from util import projective_plane_oracle, round_sphere_metric, round_sphere_symplectic

HOPF = builtin("hopf")
LINEAR = builtin("linear_translation")
FIBER_PARAMS = (0.0, np.pi / 3.0, np.pi)


def span_projector(vectors):
    M = np.column_stack(vectors)
    return M @ np.linalg.lstsq(M, np.eye(M.shape[0]), rcond=None)[0]


def test_project_to_level_radial():
    m = project_to_level(HOPF.mu, ChartPoint([1.1, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(m.coords, [1.0, 0.0, 0.0, 0.0], atol=1e-9)


def test_project_to_level_noop_on_level():
    start = ChartPoint([0.0, 1.0, 0.0, 0.0])
    m = project_to_level(HOPF.mu, start)
    np.testing.assert_allclose(m.coords, start.coords, atol=0.0)


def test_project_to_level_rejects_critical_level():
    zero_level = MomentumMap(HOPF.mu.components, [0.0])
    with pytest.raises(NotRegularValueError):
        project_to_level(zero_level, ChartPoint([0.1, 0.0, 0.0, 0.0]))


def test_project_to_level_budget():
    with pytest.raises(NoConvergenceError):
        project_to_level(HOPF.mu, ChartPoint([5.0, 0.0, 0.0, 0.0]), max_iter=1)


def test_split_tangent_hopf_pole():
    split = split_tangent(HOPF, ChartPoint([1.0, 0.0, 0.0, 0.0]))
    assert len(split.level_tangent) == 3
    np.testing.assert_allclose(split.vertical[0].components, [0.0, -1.0, 0.0, 0.0], atol=1e-10)
    H = span_projector([v.components for v in split.horizontal])
    expected = span_projector([np.eye(4)[2], np.eye(4)[3]])
    np.testing.assert_allclose(H, expected, atol=1e-9)


def test_split_tangent_linear_scenario():
    split = split_tangent(LINEAR, ChartPoint([0.0, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(split.vertical[0].components, [1.0, 0.0, 0.0, 0.0], atol=1e-10)
    H = span_projector([v.components for v in split.horizontal])
    expected = span_projector([np.eye(4)[2], np.eye(4)[3]])
    np.testing.assert_allclose(H, expected, atol=1e-10)


def test_split_tangent_rejects_off_level():
    with pytest.raises(NotOnLevelError):
        split_tangent(HOPF, ChartPoint([1.1, 0.0, 0.0, 0.0]))


def test_split_tangent_rejects_frozen_action():
    frozen = ReductionScenario(
        name="frozen",
        chart_dim=4,
        omega=standard_symplectic(4),
        metric=euclidean_metric(4),
        acs=standard_acs(4),
        action=GroupAction(group_dim=1, flow=lambda a, p: p,
                           quadrature=uniform_circle_quadrature(4)),
        mu=MomentumMap((TensorField.scalar(lambda p: float(p.coords[1])),), [0.0]),
        quotient_dim=2,
        section=lambda w: ChartPoint([0.0, 0.0, w.coords[0], w.coords[1]]),
    )
    with pytest.raises(ActionNotFreeError):
        split_tangent(frozen, ChartPoint([0.0, 0.0, 0.0, 0.0]))


def test_vertical_ad_invariance():
    res = check_vertical_ad_invariance(HOPF, ChartPoint([1.0, 0.0, 0.0, 0.0]), np.pi / 3.0)
    assert res.max_residual < 1e-8
    res = check_vertical_ad_invariance(LINEAR, ChartPoint([0.0, 0.0, 1.0, -2.0]), 0.7)
    assert res.max_residual < 1e-10


def test_vertical_ad_invariance_negative_control():
    # a horizontal vector is nowhere near the vertical span
    split = split_tangent(HOPF, ChartPoint([1.0, 0.0, 0.0, 0.0]))
    G = eval_field(HOPF.metric, split.base)
    horizontal = split.horizontal[0].components
    v_onb = [split.vertical[0].components]
    w = horizontal.copy()
    for b in v_onb:
        w -= (b @ G @ w) * b
    assert np.sqrt(w @ G @ w) > 0.9


def test_reduced_metric_matches_round_sphere():
    for w in ([0.0, 0.0], [1.0, 0.0], [-0.4, 1.3]):
        h = reduced_metric(HOPF, ChartPoint(w))
        np.testing.assert_allclose(h, round_sphere_metric(np.array(w)), atol=1e-6)


def test_reduced_metric_linear_scenario_flat():
    for w in ([0.0, 0.0], [1.5, -0.7]):
        np.testing.assert_allclose(reduced_metric(LINEAR, ChartPoint(w)), np.eye(2), atol=1e-10)


def test_reduced_symplectic_matches_area_form():
    np.testing.assert_allclose(reduced_symplectic(HOPF, ChartPoint([0.0, 0.0])),
                               [[0.0, 1.0], [-1.0, 0.0]], atol=1e-6)
    np.testing.assert_allclose(reduced_symplectic(HOPF, ChartPoint([1.0, 0.0])),
                               0.25 * np.array([[0.0, 1.0], [-1.0, 0.0]]), atol=1e-5)
    np.testing.assert_allclose(reduced_symplectic(LINEAR, ChartPoint([0.3, 0.9])),
                               [[0.0, 1.0], [-1.0, 0.0]], atol=1e-10)


def test_reduced_acs_standard_on_quotient():
    np.testing.assert_allclose(reduced_acs(HOPF, ChartPoint([0.0, 0.0])),
                               standard_acs_matrix(2), atol=1e-6)
    np.testing.assert_allclose(reduced_acs(LINEAR, ChartPoint([1.0, 2.0])),
                               standard_acs_matrix(2), atol=1e-10)
    # broken compatibility leaves the pushforward candidate untouched
    skewed = builtin("skewed_metric_hopf")
    np.testing.assert_allclose(reduced_acs(skewed, ChartPoint([0.0, 0.0])),
                               standard_acs_matrix(2), atol=1e-6)


def test_reduced_structures_invariants_on_samples():
    for x in sample_quotient_points(HOPF, 10, seed=2):
        red = reduced_structures(HOPF, x)
        assert np.max(np.abs(red.h_beta - red.h_beta.T)) < 1e-9
        assert np.linalg.eigvalsh(red.h_beta)[0] > 0
        assert np.max(np.abs(red.omega_beta + red.omega_beta.T)) < 1e-9
        assert abs(np.linalg.det(red.omega_beta)) > 1e-4
        np.testing.assert_allclose(red.h_beta, round_sphere_metric(x.coords), atol=1e-5)
        np.testing.assert_allclose(red.omega_beta, round_sphere_symplectic(x.coords), atol=1e-5)


def test_section_must_land_on_level():
    broken = ReductionScenario(
        name="off-level",
        chart_dim=4,
        omega=HOPF.omega,
        metric=HOPF.metric,
        acs=HOPF.acs,
        action=HOPF.action,
        mu=HOPF.mu,
        quotient_dim=2,
        section=lambda w: ChartPoint([1.1, 0.0, w.coords[0], w.coords[1]]),
    )
    with pytest.raises(SectionNotOnLevelError):
        reduced_metric(broken, ChartPoint([0.0, 0.0]))


def test_rank_deficient_lift_detected():
    # this "section" lands on the level but its pushforward is vertical in
    # one direction, so the lift frame cannot invert d pi on H
    degenerate = ReductionScenario(
        name="degenerate-section",
        chart_dim=4,
        omega=LINEAR.omega,
        metric=LINEAR.metric,
        acs=LINEAR.acs,
        action=LINEAR.action,
        mu=LINEAR.mu,
        quotient_dim=2,
        section=lambda w: ChartPoint([w.coords[0], 0.0, w.coords[1], 0.0]),
    )
    with pytest.raises(RankDeficientLiftError):
        reduced_metric(degenerate, ChartPoint([0.4, 0.2]))


def test_generator_index_bounds():
    with pytest.raises(ValueError):
        from symred.actions import generator
        generator(HOPF.action, 3, ChartPoint([1.0, 0.0, 0.0, 0.0]))


def test_vertical_leak_warning_for_tilted_acs():
    # rotate the acs into the level-normal direction so J(H) leaves the level
    alpha = 0.4
    c, s = np.cos(alpha), np.sin(alpha)
    R = np.eye(4)
    R[0, 0], R[0, 2], R[2, 0], R[2, 2] = c, -s, s, c
    tilted = TensorField.constant(R @ standard_acs_matrix(4) @ R.T)
    scen = ReductionScenario(
        name="tilted",
        chart_dim=4,
        omega=LINEAR.omega,
        metric=LINEAR.metric,
        acs=tilted,
        action=LINEAR.action,
        mu=LINEAR.mu,
        quotient_dim=2,
        section=LINEAR.section,
    )
    with pytest.warns(VerticalLeakWarning):
        reduced_acs(scen, ChartPoint([0.2, -0.3]))


def test_verify_submersion_hopf():
    points = sample_quotient_points(HOPF, 8, seed=20)
    report = verify_submersion(HOPF, points, FIBER_PARAMS)
    assert report.passed
    assert report.find("fiber independence").max_residual < 1e-6
    assert report.find("dimension counts").max_residual == 0.0


def test_all_reduced_objects_fiber_independent():
    # move the section along the fibre and recompute everything, not just h
    from symred.actions import apply_flow
    from symred.reduction import _lift_frame, _reduced_from_frame

    for x in sample_quotient_points(HOPF, 5, seed=22):
        base = _reduced_from_frame(_lift_frame(HOPF, x))
        for a in (np.array([np.pi / 3.0]), np.array([np.pi])):
            moved = _reduced_from_frame(_lift_frame(
                HOPF, x,
                section=lambda q, _a=a: apply_flow(HOPF.action, _a, HOPF.section_point(q))))
            for here, there in zip(base[:3], moved[:3]):
                assert np.max(np.abs(here - there)) < 1e-6


def test_verify_submersion_linear_exact():
    points = sample_quotient_points(LINEAR, 8, seed=21)
    report = verify_submersion(LINEAR, points, FIBER_PARAMS)
    assert report.passed
    assert report.find("fiber independence").max_residual < 1e-10


def test_verify_submersion_noninvariant_metric_fails():
    scen = builtin("noninvariant_metric_hopf")
    points = sample_quotient_points(scen, 10, seed=7)
    report = verify_submersion(scen, points, FIBER_PARAMS)
    check = report.find("fiber independence")
    assert not check.passed
    assert check.max_residual > 1e-3


def test_verify_reduction_identity_hopf_and_linear():
    report = verify_reduction_identity(HOPF, sample_quotient_points(HOPF, 10, seed=3), seed=3)
    assert report.passed
    assert report.find("pullback identity").max_residual < 1e-6
    assert report.find("vertical degeneracy").max_residual < 1e-8

    report = verify_reduction_identity(LINEAR, sample_quotient_points(LINEAR, 10, seed=4), seed=4)
    assert report.find("pullback identity").max_residual < 1e-10


def test_verify_main_theorem_positive_branch():
    report = verify_main_theorem(HOPF, sample_quotient_points(HOPF, 10, seed=5))
    assert report.passed
    iff = report.find("main theorem iff")
    assert iff.extras["branch"] == "positive"
    assert iff.extras["hypothesis_ok"] is True
    for entry in report.meta["samples"]:
        assert entry["acm_residual"] < 1e-5
        assert entry["compat_residual"] < 1e-5
        assert entry["acs_residual"] < 1e-5
        assert entry["lift_solve_residual"] < 1e-10


def test_verify_main_theorem_skewed_control():
    scen = builtin("skewed_metric_hopf")
    points = [ChartPoint([0.0, 0.0])] + sample_quotient_points(scen, 6, seed=6)
    report = verify_main_theorem(scen, points)
    compat = report.find("reduced compatibility")
    assert abs(compat.max_residual - 3.0) < 1e-6
    assert list(compat.worst_point.coords) == [0.0, 0.0]
    iff = report.find("main theorem iff")
    assert iff.extras["hypothesis_violated"] is True
    assert not report.passed
    at_zero = report.meta["samples"][0]
    assert abs(at_zero["compat_residual"] - 3.0) < 1e-6


def test_verify_main_theorem_linear_exact():
    report = verify_main_theorem(LINEAR, sample_quotient_points(LINEAR, 8, seed=8))
    assert report.passed
    for entry in report.meta["samples"]:
        assert entry["acm_residual"] < 1e-10
        assert entry["compat_residual"] < 1e-10
        assert entry["acs_residual"] < 1e-10


def test_three_plane_reduction_matches_complex_oracle():
    # six-dimensional chart, four-dimensional curved quotient; the oracle
    # uses exact complex arithmetic, the pipeline uses FD + lifts
    scen = builtin("euclidean_r2n", planes=3)
    assert scen.chart_dim == 6 and scen.quotient_dim == 4
    for w in ([0.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.3, -0.7, 1.1, 0.4]):
        x = ChartPoint(w)
        h_oracle, w_oracle = projective_plane_oracle(np.asarray(w))
        np.testing.assert_allclose(reduced_metric(scen, x), h_oracle, atol=1e-8)
        np.testing.assert_allclose(reduced_symplectic(scen, x), w_oracle, atol=1e-8)
        np.testing.assert_allclose(reduced_acs(scen, x), standard_acs_matrix(4), atol=1e-8)


def test_three_plane_reduction_pipelines_pass():
    scen = builtin("euclidean_r2n", planes=3)
    points = sample_quotient_points(scen, 5, seed=19, radius=1.5)
    assert verify_submersion(scen, points, FIBER_PARAMS).passed
    assert verify_reduction_identity(scen, points, seed=19).passed
    report = verify_main_theorem(scen, points)
    assert report.passed
    assert report.find("main theorem iff").extras["branch"] == "positive"


def test_reduction_with_order_two_differences():
    cfg = FDConfig(step=1e-6, order=2)
    h = reduced_metric(HOPF, ChartPoint([1.0, 0.0]), cfg)
    np.testing.assert_allclose(h, 0.25 * np.eye(2), atol=1e-8)


def test_quotient_dim_bookkeeping_warns():
    with pytest.warns(UserWarning, match="quotient dimension"):
        ReductionScenario(
            name="odd-counting",
            chart_dim=4,
            omega=HOPF.omega,
            metric=HOPF.metric,
            acs=HOPF.acs,
            action=HOPF.action,
            mu=HOPF.mu,
            quotient_dim=3,
            section=HOPF.section,
            quotient_chart_dim=3,
        )
