import numpy as np
import pytest
from conftest import random_unit
from hypothesis import given
from hypothesis import strategies as st

from hybridsphere.points import (
    CapSpec,
    generate_cap_spiral,
    generate_equal_area,
    generate_experiment_set,
    geodesic_distance,
    mesh_norm,
    min_separation,
    nearest_distance,
    read_points,
    validate_points,
    write_points,
)

NORTH = np.array([0.0, 0.0, 1.0])


def brute_min_separation(pts):
    best = np.inf
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = min(best, np.arccos(np.clip(pts[i] @ pts[j], -1.0, 1.0)))
    return best


class TestGeodesicDistance:
    def test_identical(self):
        assert geodesic_distance(NORTH, NORTH) == 0.0

    def test_antipodal(self):
        assert geodesic_distance(NORTH, -NORTH) == pytest.approx(np.pi, abs=1e-15)

    def test_orthogonal(self):
        assert geodesic_distance([1.0, 0, 0], [0, 1.0, 0]) == pytest.approx(np.pi / 2, abs=1e-15)

    def test_clamps_rounding(self):
        a = np.array([0.6, 0.8, 0.0])
        # a slightly overlong copy would give a dot product above 1
        assert geodesic_distance(a, a * (1 + 1e-15)) == 0.0

    @given(st.integers(0, 2**31 - 1))
    def test_symmetric_and_bounded(self, seed):
        a, b = random_unit(np.random.default_rng(seed), 2)
        d = geodesic_distance(a, b)
        assert d == geodesic_distance(b, a)
        assert 0.0 <= d <= np.pi


class TestEqualArea:
    def test_two_points_are_poles(self):
        pts = generate_equal_area(2)
        np.testing.assert_array_equal(pts, [[0, 0, -1], [0, 0, 1]])

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            generate_equal_area(1)

    def test_n100_valid(self):
        pts = generate_equal_area(100)
        assert pts.shape == (100, 3)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
        validate_points(pts)

    def test_heights_and_longitudes(self):
        n = 50
        pts = generate_equal_area(n)
        h = -1 + 2 * np.arange(n) / (n - 1)
        np.testing.assert_allclose(pts[:, 2], h, atol=1e-15)
        # recompute the longitude recurrence independently
        phi = 0.0
        for k in range(1, n - 1):
            phi = (phi + 3.6 / np.sqrt(n * (1 - h[k] ** 2))) % (2 * np.pi)
            assert np.arctan2(pts[k, 1], pts[k, 0]) % (2 * np.pi) == pytest.approx(phi, abs=1e-12)

    def test_mesh_norm_n400(self):
        pts = generate_equal_area(400)
        assert mesh_norm(pts) <= 2.5 * np.sqrt(4 * np.pi / 400)

    @given(st.integers(2, 400))
    def test_unit_and_distinct(self, n):
        pts = generate_equal_area(n)
        assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) <= 1e-12
        assert min_separation(pts) > 1e-10


class TestCapSpec:
    def test_radius_range(self):
        for bad in (0.0, np.pi, -0.1):
            with pytest.raises(ValueError):
                CapSpec(radius=bad)

    def test_axis_must_be_unit(self):
        with pytest.raises(ValueError):
            CapSpec(axis=(0, 0, 2))

    def test_boundary_counts_as_inside(self):
        cap = CapSpec(radius=0.1)
        rim = generate_cap_spiral(10, cap)[:1]
        assert geodesic_distance(rim[0], NORTH) <= 0.1
        assert cap.contains(rim)[0]


class TestExperimentSet:
    def test_cap_layout(self):
        cap = CapSpec(radius=0.1)
        pts = generate_experiment_set(2000, cap, 1000)
        assert pts.shape == (2000, 3)
        d = geodesic_distance(pts, NORTH)
        assert int(np.sum(d <= 0.1)) == 1000
        validate_points(pts)

    def test_n_cap_zero_trims_whole_sphere(self):
        cap = CapSpec(radius=0.1)
        pts = generate_experiment_set(500, cap, 0)
        # reproduce the oversample-and-trim rule by hand
        n = 500
        while True:
            s = generate_equal_area(n)
            out = s[~cap.contains(s)]
            if out.shape[0] >= 500:
                break
            n += 500 - out.shape[0]
        np.testing.assert_array_equal(pts, out[:500])

    def test_infeasible(self):
        with pytest.raises(ValueError):
            generate_experiment_set(100, CapSpec(), 100)
        with pytest.raises(ValueError):
            generate_experiment_set(100, CapSpec(), -1)

    @given(st.integers(3, 300), st.integers(0, 200), st.floats(0.05, 1.0))
    def test_counts(self, n_total, n_cap, radius):
        if n_total - n_cap < 2:
            return
        cap = CapSpec(radius=radius)
        pts = generate_experiment_set(n_total, cap, n_cap)
        assert pts.shape[0] == n_total
        assert int(cap.contains(pts).sum()) == n_cap
        assert min_separation(pts) > 1e-10

    def test_cap_spiral_inside(self):
        cap = CapSpec(radius=0.3)
        pts = generate_cap_spiral(200, cap)
        assert cap.contains(pts).all()
        np.testing.assert_array_equal(pts[-1], NORTH)


class TestMeshNorm:
    def test_single_point(self):
        assert mesh_norm(np.array([NORTH]), 20000) == pytest.approx(np.pi, abs=0.05)

    def test_two_poles(self):
        assert mesh_norm(np.array([NORTH, -NORTH]), 20000) == pytest.approx(np.pi / 2, abs=0.02)

    def test_n1000(self):
        pts = generate_equal_area(1000)
        probes = generate_equal_area(10 * 1000)
        h = mesh_norm(pts, 10 * 1000)
        assert 0.0 < h < 0.25
        # brute-force oracle over the same probe grid
        brute = max(np.min(np.arccos(np.clip(pts @ q, -1, 1))) for q in probes[::1])
        assert h == pytest.approx(brute, abs=1e-14)

    def test_monotone_when_adding_points(self):
        pts = generate_equal_area(200)
        extra = np.vstack((pts, generate_equal_area(37)[1:-1]))
        assert mesh_norm(extra, 4000) <= mesh_norm(pts, 4000)

    def test_nearest_distance_zero_at_data(self):
        pts = generate_equal_area(50)
        np.testing.assert_allclose(nearest_distance(pts, pts), 0.0, atol=5e-8)


class TestMinSeparation:
    def test_antipodal(self):
        assert min_separation(np.array([NORTH, -NORTH])) == pytest.approx(np.pi)

    def test_three_orthogonal(self):
        assert min_separation(np.eye(3)) == pytest.approx(np.pi / 2)

    def test_matches_brute_force(self):
        pts = generate_equal_area(100)
        assert min_separation(pts) == brute_min_separation(pts)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            min_separation(np.array([NORTH]))


class TestValidate:
    def test_not_unit(self):
        with pytest.raises(ValueError, match="unit"):
            validate_points([[1.0, 1.0, 0.0]])

    def test_duplicates(self):
        with pytest.raises(ValueError, match="coincident"):
            validate_points([NORTH, NORTH])

    def test_empty(self):
        with pytest.raises(ValueError):
            validate_points(np.empty((0, 3)))


def test_point_file_roundtrip(tmp_path):
    pts = generate_experiment_set(400, CapSpec(), 100)
    path = tmp_path / "pts.txt"
    write_points(path, pts)
    back = read_points(path)
    np.testing.assert_array_equal(back, pts)
    first = path.read_bytes()
    write_points(path, pts)
    assert path.read_bytes() == first
    assert path.read_text().startswith("#")
