import numpy as np
import pytest

from upgame.enclosing import chebyshev_center, minimal_ball_exact
from upgame.hilbert import build_action, default_model


def test_two_points():
    center, radius = chebyshev_center(np.array([[-1.0], [1.0]]))
    assert center == pytest.approx([0.0])
    assert radius == pytest.approx(1.0)


def test_equilateral_triangle():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    center, radius = chebyshev_center(points)
    assert radius == pytest.approx(1 / np.sqrt(3), abs=1e-6)
    assert center == pytest.approx([0.5, 0.5 / np.sqrt(3)], abs=1e-6)


def test_single_point_and_empty():
    center, radius = chebyshev_center(np.array([[2.0, 3.0]]))
    assert radius == 0.0 and center == pytest.approx([2.0, 3.0])
    with pytest.raises(ValueError):
        chebyshev_center(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        minimal_ball_exact(np.zeros((0, 2)))


def test_matches_exact_oracle_low_dim():
    rng = np.random.default_rng(42)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(2, 12))
        points = rng.standard_normal((n, d)) * rng.uniform(0.5, 3)
        _, fast = chebyshev_center(points, tol=1e-9)
        _, exact = minimal_ball_exact(points)
        assert abs(fast - exact) <= 1e-6


def test_oracle_rejects_high_dim():
    with pytest.raises(ValueError):
        minimal_ball_exact(np.zeros((3, 4)))


def test_returned_radius_covers():
    rng = np.random.default_rng(9)
    points = rng.standard_normal((40, 6))
    center, radius = chebyshev_center(points)
    assert np.linalg.norm(points - center, axis=1).max() <= radius + 1e-12


def test_orbit_center_is_group_fixed():
    action = build_action(default_model(), seed=7)
    zeta = np.random.default_rng(3).standard_normal(action.dim) * 2
    orbit = action.apply_all(zeta)
    center, radius = chebyshev_center(orbit)
    moved = np.linalg.norm(action.pis @ center + action.bs - center[None, :], axis=1).max()
    assert moved <= 1e-5
    # all orbit points are equidistant from the fixed center
    dists = np.linalg.norm(orbit - center, axis=1)
    assert np.ptp(dists) <= 1e-8 * (1 + radius)
