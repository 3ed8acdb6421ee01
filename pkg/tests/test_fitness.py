import math

import numpy as np
import pytest

from esl.errors import InvalidInputError
from esl.fitness import FitnessConfig, fitness_max, fitness_min
from esl.model import Hypergraph, Simplicial

POINT = Simplicial(np.zeros((2, 1)), Hypergraph(((0,),), 1))


def many_points(count):
    """Simplicial of isolated points: cumulative content equals count."""
    return Simplicial(
        np.zeros((2, count)), Hypergraph(tuple((i,) for i in range(count)), count)
    )


def segment_plus_point():
    verts = np.array([[0.0, 1.0, 4.0], [0.0, 0.0, 4.0]])
    return Simplicial(verts, Hypergraph(((0, 1), (2,)), 3))


class TestFitnessMax:
    def test_beta_zero_reduces_to_data_fidelity(self):
        cfg = FitnessConfig(beta=0.0)
        assert fitness_max(1.0, POINT, 100, cfg) == pytest.approx(2.0, abs=1e-15)

    def test_content_damping_arithmetic(self):
        # 90 isolated points with gamma=10 puts exactly 100 inside the log.
        cfg = FitnessConfig(beta=0.05, gamma=10.0)
        value = fitness_max(1.0, many_points(90), 100, cfg)
        assert value == pytest.approx(2.0 / 1.1, rel=1e-12)

    def test_zero_at_sse_equal_n(self):
        assert fitness_max(100.0, POINT, 100, FitnessConfig()) == pytest.approx(0.0, abs=1e-15)

    def test_floor_keeps_exact_fits_finite(self):
        value = fitness_max(0.0, POINT, 10, FitnessConfig())
        assert math.isfinite(value)
        assert value == fitness_max(1e-15, POINT, 10, FitnessConfig())

    def test_strictly_decreasing_in_error(self):
        cfg = FitnessConfig()
        values = [fitness_max(sse, POINT, 50, cfg) for sse in (0.1, 1.0, 5.0, 49.0, 200.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_strictly_decreasing_in_content(self):
        cfg = FitnessConfig(beta=0.05)
        values = [fitness_max(1.0, many_points(k), 50, cfg) for k in (1, 4, 16, 64)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_rejects_negative_sse(self):
        with pytest.raises(InvalidInputError):
            fitness_max(-1.0, POINT, 10, FitnessConfig())


class TestFitnessMin:
    def test_single_point_regularizer(self):
        assert fitness_min(0.0, POINT, FitnessConfig(alpha=1.0)) == pytest.approx(1.0)

    def test_alpha_zero_is_plain_sse(self):
        assert fitness_min(3.25, POINT, FitnessConfig(alpha=0.0)) == pytest.approx(3.25)

    def test_segment_plus_point_arithmetic(self):
        value = fitness_min(2.5, segment_plus_point(), FitnessConfig(alpha=2.0))
        assert value == pytest.approx(2.5 + 2.0 * 5.0)


class TestFitnessConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"beta": -0.1},
            {"gamma": 0.0},
            {"gamma": -1.0},
            {"alpha": -1.0},
            {"sse_floor": 0.0},
        ],
    )
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(InvalidInputError):
            FitnessConfig(**kwargs)
