"""Fitness of a simplicial against a dataset.

Two forms: a minimization candidate (error plus weighted content) and the
logarithmic maximization form actually used by the evolutionary search,
which compresses the dynamic range of both terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError
from .geometry import cumulative_content
from .model import Simplicial


@dataclass(frozen=True)
class FitnessConfig:
    """Fitness hyperparameters.

    ``beta`` regulates over/under-fitting (0 turns the compactness term
    off), ``gamma`` offsets the content inside the log, ``alpha`` weighs the
    content in the minimization form, and ``sse_floor`` bounds the error away
    from zero so exact fits stay finite.
    """

    beta: float = 0.05
    gamma: float = 10.0
    alpha: float = 1.0
    sse_floor: float = 1e-12

    def __post_init__(self):
        if self.beta < 0:
            raise InvalidInputError("beta must be non-negative")
        if self.gamma <= 0:
            raise InvalidInputError("gamma must be positive")
        if self.alpha < 0:
            raise InvalidInputError("alpha must be non-negative")
        if self.sse_floor <= 0:
            raise InvalidInputError("sse_floor must be positive")


def fitness_max(total_sse: float, s: Simplicial, n_samples: int, cfg: FitnessConfig) -> float:
    """Maximization-form fitness: log10(n / SSE) damped by model content.

    Positive exactly when the SSE is below the sample count (the content term
    is >= 1, so the denominator stays positive for gamma >= 1).
    """
    if total_sse < 0:
        raise InvalidInputError("total_sse must be non-negative")
    if n_samples < 1:
        raise InvalidInputError("n_samples must be positive")
    numerator = math.log10(n_samples / max(total_sse, cfg.sse_floor))
    denominator = 1.0 + cfg.beta * math.log10(cfg.gamma + cumulative_content(s))
    return numerator / denominator


def fitness_min(total_sse: float, s: Simplicial, cfg: FitnessConfig) -> float:
    """Minimization-form fitness: SSE plus alpha times cumulative content."""
    if total_sse < 0:
        raise InvalidInputError("total_sse must be non-negative")
    return total_sse + cfg.alpha * cumulative_content(s)
