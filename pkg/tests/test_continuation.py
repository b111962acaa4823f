"""
Tests for the predictor-corrector tracker
"""

import numpy as np
import pytest

from cfunc.config import TrackerSettings
from cfunc.continuation import (
    Homotopy,
    PathStatus,
    SquareSystem,
    TotalDegreeHomotopy,
    cluster_points,
    condition_number,
    map_paths,
    refine,
    track_path,
)


class CircleLine(SquareSystem):
    """x^2 + y^2 = 5, xy = 2"""

    def residual(self, x):
        return np.array([x[0] ** 2 + x[1] ** 2 - 5, x[0] * x[1] - 2])

    def jacobian(self, x):
        return np.array([[2 * x[0], 2 * x[1]], [x[1], x[0]]])


class SquareRoot(SquareSystem):
    """x^2 = 2"""

    def residual(self, x):
        return np.array([x[0] ** 2 - 2])

    def jacobian(self, x):
        return np.array([[2 * x[0]]])


class Drift(Homotopy):
    """x = 1 + t, with dt left to the central difference"""

    def residual(self, x, t):
        return x - (1 + t)

    def jacobian(self, x, t):
        return np.eye(len(x), dtype=complex)


def test_track_linear_drift():
    """Test a trivial homotopy is followed to its end value"""
    result = track_path(Drift(), np.array([1.0 + 0j]), 0.0, 1.0, TrackerSettings())
    assert result.status == PathStatus.SUCCESS
    assert result.t == 1.0
    assert abs(result.x[0] - 2.0) < 1e-9
    assert result.steps > 0


def test_total_degree_start_points():
    """Test start points solve x_i^2 = r_i and enumerate all sign patterns"""
    r = np.array([2.0 + 1j, -1.0 + 0.5j])
    H = TotalDegreeHomotopy(CircleLine(), r, gamma=0.6 + 0.8j)
    starts = H.start_points()
    assert len(starts) == 4
    for x in starts:
        assert np.allclose(H.residual(x, 0.0), 0.0)
    assert len(cluster_points(starts, 1e-6)) == 4


def test_total_degree_finds_all_solutions():
    """Test every path of the circle-line system ends at one of its four roots"""
    rng = np.random.default_rng(5)
    r = rng.normal(size=2) + 1j * rng.normal(size=2)
    gamma = np.exp(2j * np.pi * rng.uniform())
    H = TotalDegreeHomotopy(CircleLine(), r, gamma)
    ends = [track_path(H, x0, 0.0, 1.0, TrackerSettings()) for x0 in H.start_points()]
    assert all(e.status == PathStatus.SUCCESS for e in ends)
    found = sorted((round(e.x[0].real, 6), round(e.x[1].real, 6)) for e in ends)
    assert found == [(-2.0, -1.0), (-1.0, -2.0), (1.0, 2.0), (2.0, 1.0)]


def test_analytic_dt_matches_difference():
    """Test the total-degree t-derivative against a central difference"""
    H = TotalDegreeHomotopy(CircleLine(), np.array([1.0, 2.0]), gamma=1j)
    x = np.array([0.3 + 0.1j, -0.7 + 0.2j])
    numeric = Homotopy.dt(H, x, 0.4)
    assert np.allclose(H.dt(x, 0.4), numeric, atol=1e-6)


def test_refine_and_condition():
    """Test Newton refinement reaches sqrt(2) and a regular root is well conditioned"""
    root = refine(SquareRoot(), np.array([1.4 + 0j]))
    assert abs(root[0] - np.sqrt(2)) < 1e-12
    assert condition_number(SquareRoot(), root) == pytest.approx(1.0)


def test_cluster_points():
    """Test clustering keeps input order and the first member as anchor"""
    points = [np.array([0.0]), np.array([1.0]), np.array([1e-6]), np.array([1.0 + 5e-5])]
    assert cluster_points(points, 1e-4) == [[0, 2], [1, 3]]
    assert cluster_points([], 1e-4) == []


@pytest.mark.parametrize("workers", [1, 2])
def test_map_paths_preserves_order(workers):
    """Test sequential and pooled mapping return results in input order"""
    assert map_paths(abs, [-3, 1, -2, 5, -8], workers=workers) == [3, 1, 2, 5, 8]
