import numpy as np
import pytest

from uwb_locsim import (
    Anchor,
    ParameterError,
    Point3,
    SingularGeometryError,
    SolverConfig,
    jacobian,
    localization_error,
    solve,
)
from uwb_locsim.solver import reference_point, solve_batch, anchor_positions


def _anchor(i, x, y, z):
    return Anchor(str(i), Point3(x, y, z))


SQUARE = [_anchor(0, 0, 0, 0), _anchor(1, 10, 0, 0), _anchor(2, 0, 10, 0), _anchor(3, 10, 10, 3)]


def _exact_distances(anchors, truth):
    return [np.linalg.norm(a.position.as_array() - truth) for a in anchors]


def test_jacobian_unit_direction():
    rows = jacobian(Point3(0, 0, 0), [_anchor(0, 1, 0, 0)])
    np.testing.assert_allclose(rows, [[1.0, 0.0, 0.0]], atol=1e-15)


def test_jacobian_345_direction():
    rows = jacobian(Point3(0, 0, 0), [_anchor(0, 3, 4, 0)])
    np.testing.assert_allclose(rows, [[0.6, 0.8, 0.0]], atol=1e-15)


def test_jacobian_rows_unit_norm():
    rng = np.random.default_rng(5)
    for _ in range(50):
        anchors = [_anchor(i, *rng.uniform(-5, 5, 3)) for i in range(6)]
        x = Point3(*rng.uniform(-4, 4, 3))
        rows = jacobian(x, anchors)
        np.testing.assert_allclose(np.linalg.norm(rows, axis=1), 1.0, atol=1e-12)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(6)
    step = 1e-6
    for _ in range(20):
        anchors = [_anchor(i, *rng.uniform(-5, 5, 3)) for i in range(5)]
        x = rng.uniform(-4, 4, 3)
        rows = jacobian(Point3(*x), anchors)
        positions = anchor_positions(anchors)
        for k in range(3):
            plus, minus = x.copy(), x.copy()
            plus[k] += step
            minus[k] -= step
            h_plus = np.linalg.norm(positions - plus, axis=1)
            h_minus = np.linalg.norm(positions - minus, axis=1)
            # rows hold the direction toward each anchor = -dh/dx
            fd = -(h_plus - h_minus) / (2 * step)
            np.testing.assert_allclose(rows[:, k], fd, atol=1e-5)


def test_jacobian_anchor_coincidence():
    with pytest.raises(SingularGeometryError):
        jacobian(Point3(1, 2, 3), [_anchor(0, 1, 2, 3 + 1e-12)])


def test_zero_noise_recovery():
    truth = np.array([5.0, 5.0, 1.0])
    config = SolverConfig(delta=1e-9, k_max=20, c=0.0, x0=Point3(4, 4, 0))
    estimate = solve(config, SQUARE, _exact_distances(SQUARE, truth))
    assert estimate.converged
    assert np.linalg.norm(estimate.position.as_array() - truth) < 1e-6
    assert estimate.iterations <= 20


def test_solve_respects_k_max():
    truth = np.array([5.0, 5.0, 1.0])
    config = SolverConfig(delta=1e-15, k_max=3, c=0.0, x0=Point3(4, 4, 0))
    estimate = solve(config, SQUARE, _exact_distances(SQUARE, truth))
    assert estimate.iterations == 3
    assert not estimate.converged


def test_solve_input_validation():
    with pytest.raises(ParameterError):
        solve(SolverConfig(), SQUARE, [1.0, 2.0, 3.0])
    with pytest.raises(ParameterError):
        solve(SolverConfig(), SQUARE, [1.0, 2.0, 3.0, -1.0])
    with pytest.raises(ParameterError):
        solve(SolverConfig(), SQUARE[:2], [1.0, 2.0])


def test_singular_geometry_with_unregularized_collinear_anchors():
    collinear = [_anchor(i, float(i), 0.0, 0.0) for i in range(4)]
    with pytest.raises(SingularGeometryError):
        solve(SolverConfig(c=0.0, x0=Point3(1.0, 0.0, 0.0)), collinear, [1.0, 1.0, 1.0, 2.0])


def test_regularization_keeps_collinear_solvable():
    collinear = [_anchor(i, float(i), 0.0, 0.0) for i in range(4)]
    estimate = solve(SolverConfig(c=0.1), collinear, [1.0, 1.0, 1.0, 2.0])
    assert np.isfinite(estimate.position.as_array()).all()


def test_translation_equivariance():
    rng = np.random.default_rng(44)
    truth = np.array([3.2, 4.1, 1.3])
    distances = _exact_distances(SQUARE, truth) + rng.normal(0, 0.05, 4)
    shift = np.array([13.0, -7.0, 2.5])
    base_cfg = SolverConfig(delta=1e-9, k_max=30, c=0.1)
    base = solve(base_cfg, SQUARE, distances).position.as_array()
    moved_anchors = [
        Anchor(a.id, Point3(*(a.position.as_array() + shift))) for a in SQUARE
    ]
    moved = solve(base_cfg, moved_anchors, distances).position.as_array()
    np.testing.assert_allclose(moved, base + shift, atol=1e-9)


def test_regularization_continuity():
    truth = np.array([5.0, 5.0, 1.0])
    distances = _exact_distances(SQUARE, truth)
    errors = []
    for c in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        config = SolverConfig(delta=1e-12, k_max=60, c=c, x0=Point3(5.2, 5.2, 1.2))
        est = solve(config, SQUARE, distances).position.as_array()
        errors.append(np.linalg.norm(est - truth))
    assert all(a >= b - 1e-12 for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-6


def test_reference_point_median_and_mean():
    np.testing.assert_allclose(reference_point(SQUARE, "median"), [5.0, 5.0, 0.0])
    np.testing.assert_allclose(reference_point(SQUARE, "mean"), [5.0, 5.0, 0.75])


def test_default_start_is_reference_point():
    # one iteration from the median reference point, both paths agree
    distances = _exact_distances(SQUARE, np.array([5.0, 5.0, 1.0]))
    auto = solve(SolverConfig(k_max=1, delta=1e-15), SQUARE, distances)
    manual = solve(
        SolverConfig(k_max=1, delta=1e-15, x0=Point3(5.0, 5.0, 0.0)), SQUARE, distances
    )
    assert auto.position == manual.position


def test_batch_matches_scalar():
    rng = np.random.default_rng(77)
    positions = anchor_positions(SQUARE)
    truths = rng.uniform(1, 9, size=(40, 3)) * np.array([1.0, 1.0, 0.25])
    distances = np.linalg.norm(positions[None, :, :] - truths[:, None, :], axis=2)
    distances += rng.normal(0, 0.07, distances.shape)
    config = SolverConfig(delta=1e-6, k_max=15, c=0.1)
    x_r = reference_point(SQUARE, "median")
    batch = solve_batch(config, positions, distances, x_r, np.broadcast_to(x_r, (40, 3)))
    for i in range(40):
        single = solve(config, SQUARE, distances[i])
        np.testing.assert_array_equal(single.position.as_array(), batch.positions[i])
        assert single.iterations == batch.iterations[i]
        assert single.converged == batch.converged[i]


def test_batch_flags_nonpositive_distances_as_failed():
    positions = anchor_positions(SQUARE)
    distances = np.array([[5.0, 5.0, 5.0, 5.0], [5.0, -0.1, 5.0, 5.0]])
    x_r = reference_point(SQUARE, "median")
    result = solve_batch(SolverConfig(), positions, distances, x_r, np.broadcast_to(x_r, (2, 3)))
    assert not result.failed[0]
    assert result.failed[1]


def test_iterate_on_anchor_is_perturbed_not_fatal():
    config = SolverConfig(delta=1e-9, k_max=30, c=0.1, x0=Point3(0.0, 0.0, 0.0))
    distances = _exact_distances(SQUARE, np.array([2.0, 2.0, 1.0]))
    estimate = solve(config, SQUARE, distances)
    assert np.isfinite(estimate.position.as_array()).all()


def test_per_anchor_weights_downweight_biased_anchor():
    spread = [_anchor(0, 0, 0, 0), _anchor(1, 10, 0, 2), _anchor(2, 0, 10, 3), _anchor(3, 10, 10, 1)]
    truth = np.array([5.0, 5.0, 1.0])
    distances = np.array(_exact_distances(spread, truth))
    distances[3] += 0.46
    start = Point3(5.2, 5.2, 1.2)
    plain = solve(SolverConfig(delta=1e-9, k_max=40, c=0.01, x0=start), spread, distances)
    weighted = solve(
        SolverConfig(delta=1e-9, k_max=40, c=0.01, x0=start, weights=(0.05, 0.05, 0.05, 5.0)),
        spread,
        distances,
    )
    err_plain = np.linalg.norm(plain.position.as_array() - truth)
    err_weighted = np.linalg.norm(weighted.position.as_array() - truth)
    assert err_weighted < err_plain / 5.0


def test_localization_error_modes():
    truth = Point3(0, 0, 0)
    est = Point3(0.3, 0.4, 1.0)
    assert localization_error(est, truth, "2d") == pytest.approx(0.5, rel=1e-12)
    assert localization_error(est, truth, "3d") == pytest.approx(np.sqrt(1.25), rel=1e-12)
    assert localization_error(truth, truth, "2d") == 0.0
    assert localization_error(truth, truth, "3d") == 0.0
    with pytest.raises(ParameterError):
        localization_error(est, truth, "4d")


def test_config_validation():
    with pytest.raises(ParameterError):
        SolverConfig(delta=0.0)
    with pytest.raises(ParameterError):
        SolverConfig(k_max=0)
    with pytest.raises(ParameterError):
        SolverConfig(c=-0.1)
    with pytest.raises(ParameterError):
        SolverConfig(weights=(1.0, 0.0))
    with pytest.raises(ParameterError):
        SolverConfig(x_r_mode="centroid")
