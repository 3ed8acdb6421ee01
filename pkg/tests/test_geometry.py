import math

import numpy as np
import pytest

from esl.errors import InvalidInputError
from esl.geometry import (
    cumulative_content,
    pairwise_sq_distances,
    project_onto_simplex,
    project_points_onto_simplex,
    pseudo_inverse,
    simplex_content,
)
from esl.model import Hypergraph, Simplicial

from oracles import grid_min_sq_error, random_simplicial

UNIT_SEGMENT = np.array([[0.0, 1.0]])
RIGHT_TRIANGLE = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def regular_tetrahedron():
    return np.array(
        [
            [0.0, 1.0, 0.5, 0.5],
            [0.0, 0.0, math.sqrt(3) / 2, math.sqrt(3) / 6],
            [0.0, 0.0, 0.0, math.sqrt(6) / 3],
        ]
    )


class TestPseudoInverse:
    def test_identity(self):
        assert np.allclose(pseudo_inverse(np.eye(3)), np.eye(3))

    def test_zero_matrix(self):
        out = pseudo_inverse(np.zeros((2, 3)))
        assert out.shape == (3, 2)
        assert np.all(out == 0.0)

    def test_full_rank_left_inverse(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(5, 3))
        assert np.allclose(pseudo_inverse(m) @ m, np.eye(3), atol=1e-8)

    @pytest.mark.parametrize("shape", [(4, 4), (6, 3), (3, 6)])
    def test_moore_penrose_identities(self, shape):
        rng = np.random.default_rng(17)
        for trial in range(20):
            m = rng.normal(size=shape)
            if trial % 2:  # force rank deficiency
                m[:, -1] = m[:, 0]
                m[-1, :] = m[0, :]
            p = pseudo_inverse(m)
            scale = max(np.abs(m).max(), 1.0)
            assert np.abs(m @ p @ m - m).max() <= 1e-8 * scale
            assert np.abs(p @ m @ p - p).max() <= 1e-8 * max(np.abs(p).max(), 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            pseudo_inverse(np.array([[1.0, np.nan]]))


class TestPairwiseDistances:
    def test_unit_segment(self):
        assert np.array_equal(pairwise_sq_distances(UNIT_SEGMENT), [[0.0, 1.0], [1.0, 0.0]])

    def test_identical_vertices(self):
        verts = np.ones((3, 4))
        assert np.all(pairwise_sq_distances(verts) == 0.0)

    def test_pythagorean_triangle(self):
        verts = np.array([[0.0, 3.0, 0.0], [0.0, 0.0, 4.0]])
        expected = [[0.0, 9.0, 16.0], [9.0, 0.0, 25.0], [16.0, 25.0, 0.0]]
        assert np.array_equal(pairwise_sq_distances(verts), expected)


class TestSimplexContent:
    def test_unit_segment_length(self):
        assert simplex_content(UNIT_SEGMENT) == pytest.approx(1.0, rel=1e-12)

    def test_right_triangle_area(self):
        assert simplex_content(RIGHT_TRIANGLE) == pytest.approx(0.5, rel=1e-12)

    def test_regular_tetrahedron_volume(self):
        expected = 1.0 / (6.0 * math.sqrt(2.0))
        assert simplex_content(regular_tetrahedron()) == pytest.approx(expected, rel=1e-9)

    def test_single_point_has_zero_content(self):
        assert simplex_content(np.array([[2.0], [3.0]])) == 0.0

    def test_degenerate_sets_have_zero_content(self):
        collinear = np.array([[0.0, 1.0, 2.0], [0.0, 1.0, 2.0]])
        assert simplex_content(collinear) == pytest.approx(0.0, abs=1e-12)
        assert simplex_content(np.zeros((2, 3))) == 0.0

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            d = int(rng.integers(2, 6))
            m = int(rng.integers(2, d + 2))
            verts = rng.normal(size=(d, m))
            rotation, _ = np.linalg.qr(rng.normal(size=(d, d)))
            shift = rng.normal(size=(d, 1))
            moved = rotation @ verts + shift
            base = simplex_content(verts)
            assert simplex_content(moved) == pytest.approx(base, rel=1e-8, abs=1e-12)

    def test_scaling_power_law(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            d = int(rng.integers(2, 6))
            m = int(rng.integers(2, d + 2))
            verts = rng.normal(size=(d, m))
            s = float(rng.uniform(0.3, 2.5))
            base = simplex_content(verts)
            assert simplex_content(s * verts) == pytest.approx(
                s ** (m - 1) * base, rel=1e-8, abs=1e-12
            )


class TestProjection:
    def test_point_on_segment(self):
        p = project_onto_simplex([0.25, 0.25], np.array([[0.0, 1.0], [0.0, 1.0]]))
        assert np.allclose(p.barycentric, [0.75, 0.25], atol=1e-12)
        assert np.allclose(p.point, [0.25, 0.25], atol=1e-12)
        assert p.sq_error == pytest.approx(0.0, abs=1e-18)

    def test_clipped_to_endpoint(self):
        p = project_onto_simplex([2.0, 2.0], np.array([[0.0, 1.0], [0.0, 1.0]]))
        assert np.allclose(p.barycentric, [0.0, 1.0])
        assert np.allclose(p.point, [1.0, 1.0])
        assert p.sq_error == pytest.approx(2.0)

    def test_foot_on_hypotenuse(self):
        p = project_onto_simplex([1.0, 1.0], RIGHT_TRIANGLE)
        assert np.allclose(p.point, [0.5, 0.5], atol=1e-12)
        assert np.allclose(p.barycentric, [0.0, 0.5, 0.5], atol=1e-12)
        assert p.sq_error == pytest.approx(0.5)

    def test_single_vertex_simplex(self):
        p = project_onto_simplex([1.0, 2.0], np.array([[0.0], [0.0]]))
        assert np.allclose(p.barycentric, [1.0])
        assert p.sq_error == pytest.approx(5.0)

    def test_matches_grid_search_oracle(self):
        verts = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
        y = np.array([0.9, -0.3, 0.5])
        p = project_onto_simplex(y, verts)
        oracle_bary, oracle_err = grid_min_sq_error(y, verts, 1000)
        assert np.abs(p.barycentric - oracle_bary).max() <= 2e-3
        assert p.sq_error <= oracle_err + 1e-6

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            project_onto_simplex([1.0, 2.0, 3.0], UNIT_SEGMENT)

    def test_optimality_against_grid_up_to_four_vertices(self):
        rng = np.random.default_rng(23)
        for _ in range(60):
            m = int(rng.integers(1, 5))
            d = int(rng.integers(m - 1 if m > 1 else 1, 5))
            verts = rng.normal(size=(d, m))
            y = rng.normal(size=d) * 1.5
            p = project_onto_simplex(y, verts)
            steps = {1: 1, 2: 2000, 3: 200, 4: 60}[m]
            _, oracle_err = grid_min_sq_error(y, verts, steps)
            assert p.sq_error <= oracle_err + 1e-6

    def test_idempotent(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            m = int(rng.integers(1, 6))
            verts = rng.normal(size=(3, m))
            first = project_onto_simplex(rng.normal(size=3) * 2, verts)
            second = project_onto_simplex(first.point, verts)
            assert second.sq_error < 1e-12

    def test_barycentric_feasible(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            m = int(rng.integers(1, 7))
            d = int(rng.integers(1, 6))
            verts = rng.normal(size=(d, m))
            p = project_onto_simplex(rng.normal(size=d) * 3, verts)
            assert p.barycentric.min() >= 0.0
            assert p.barycentric.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.allclose(verts @ p.barycentric, p.point, atol=1e-9)

    def test_batch_agrees_with_single(self):
        rng = np.random.default_rng(37)
        verts = rng.normal(size=(3, 4))
        pts = rng.normal(size=(3, 25)) * 2
        bary, errs = project_points_onto_simplex(pts, verts)
        for i in range(25):
            single = project_onto_simplex(pts[:, i], verts)
            assert errs[i] == pytest.approx(single.sq_error, abs=1e-12)
            assert np.allclose(bary[:, i], single.barycentric, atol=1e-9)


class TestCumulativeContent:
    def test_single_point(self):
        s = Simplicial(np.zeros((2, 1)), Hypergraph(((0,),), 1))
        assert cumulative_content(s) == pytest.approx(1.0)

    def test_segment_plus_point(self):
        verts = np.array([[0.0, 1.0, 5.0], [0.0, 0.0, 5.0]])
        s = Simplicial(verts, Hypergraph(((0, 1), (2,)), 3))
        assert cumulative_content(s) == pytest.approx(5.0)

    def test_unit_right_triangle(self):
        s = Simplicial(RIGHT_TRIANGLE, Hypergraph(((0, 1, 2),), 3))
        assert cumulative_content(s) == pytest.approx(1.5**3)

    def test_lower_bound_is_edge_count(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            s = random_simplicial(rng, dim=3)
            assert cumulative_content(s) >= s.simplex_count
