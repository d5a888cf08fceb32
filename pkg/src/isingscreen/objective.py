"""Interaction screening objective for one target vertex.

For target ``t`` and weights ``v`` over the other vertices (in increasing
index order, skipping ``t``)::

    S(v) = E[exp(-z_t * sum_j v_j z_j)]

The mean-field variant appends an intercept ``v_c`` and adds ``-v_c z_t``
inside the exponential. ``S`` is minimised over ``||v||_1 <= lambda`` by the
row of ``A`` at ``t`` (plus ``theta_t`` for the intercept); the lifted
objective on the simplex is ``S(simplex_to_ball(w))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EmptyInputError, NormExceededError
from .geometry import NORM_TOL, ball_to_simplex, simplex_to_ball
from .model import ENUMERATION_CAP, ExactDistribution, IsingModel, exact_probabilities


def other_vertices(n: int, target: int) -> np.ndarray:
    return np.array([j for j in range(n) if j != target], dtype=np.int64)


@dataclass(frozen=True)
class ScreeningProblem:
    """One vertex's screening problem under a known model.

    ``lambda_budget`` defaults to the model width.
    """

    model: IsingModel
    target: int
    lambda_budget: float | None = None
    mean_field: bool = False
    cap: int = ENUMERATION_CAP

    def __post_init__(self):
        if not 0 <= self.target < self.model.n:
            raise ValueError(f"target {self.target} out of range for n={self.model.n}")
        if self.lambda_budget is None:
            object.__setattr__(self, "lambda_budget", self.model.lambda_width)
        if self.lambda_budget < self.model.lambda_width - NORM_TOL:
            raise ValueError(
                f"lambda budget {self.lambda_budget} is below the model width {self.model.lambda_width}"
            )

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def dim(self) -> int:
        """Ball dimension: n - 1 edge weights, plus the intercept in mean-field mode."""
        return self.n - 1 + int(self.mean_field)

    @cached_property
    def others(self) -> np.ndarray:
        return other_vertices(self.n, self.target)

    @cached_property
    def distribution(self) -> ExactDistribution:
        return exact_probabilities(self.model, cap=self.cap)

    def check_ball(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64).ravel()
        if v.size != self.dim:
            raise ValueError(f"expected {self.dim} weights, got {v.size}")
        norm = np.abs(v).sum()
        if norm > self.lambda_budget + NORM_TOL:
            raise NormExceededError(f"||v||_1 = {norm} exceeds lambda = {self.lambda_budget}")
        return v


def _screening_terms(Z: np.ndarray, target: int, others: np.ndarray, v: np.ndarray,
                     mean_field: bool) -> tuple[np.ndarray, np.ndarray]:
    """Per-configuration ``exp(-exponent)`` and the features it multiplies.

    Features are ``z_t z_j`` for each other vertex, then ``z_t`` for the
    intercept. The gradient of the exponential term is ``-exp * features``.
    """
    Z = np.asarray(Z, dtype=np.float64)
    zt = Z[:, target]
    feats = zt[:, None] * Z[:, others]
    if mean_field:
        feats = np.column_stack([feats, zt])
    return np.exp(-feats @ v), feats


def true_minimizer(problem: ScreeningProblem) -> np.ndarray:
    """Row ``target`` of ``A`` over the other vertices (and ``theta_target``)."""
    v = problem.model.A[problem.target, problem.others].copy()
    if problem.mean_field:
        v = np.append(v, problem.model.theta[problem.target])
    return v


def true_simplex_minimizer(problem: ScreeningProblem) -> np.ndarray:
    return ball_to_simplex(true_minimizer(problem), problem.lambda_budget)


def iso_value_exact(problem: ScreeningProblem, v) -> float:
    v = problem.check_ball(v)
    dist = problem.distribution
    e, _ = _screening_terms(dist.configurations, problem.target, problem.others, v, problem.mean_field)
    # dividing by the table's own sum makes S(0) = 1 exactly
    P = dist.probabilities
    return float(np.sum(P * e) / np.sum(P))


def iso_gradient_ball(problem: ScreeningProblem, v) -> np.ndarray:
    """Exact gradient of ``S`` at the ball point ``v``."""
    v = problem.check_ball(v)
    dist = problem.distribution
    e, feats = _screening_terms(dist.configurations, problem.target, problem.others, v, problem.mean_field)
    return -(dist.probabilities * e) @ feats


def lifted_value(problem: ScreeningProblem, w) -> float:
    return iso_value_exact(problem, simplex_to_ball(w))


def iso_gradient_exact(problem: ScreeningProblem, w) -> np.ndarray:
    """Exact gradient of the lifted objective at the simplex point ``w``.

    Coordinates ``i`` and ``i + k`` are negatives of each other and the slack
    coordinate is 0.
    """
    g = iso_gradient_ball(problem, simplex_to_ball(w))
    return np.concatenate([g, -g, [0.0]])


def iso_value_empirical(samples, target: int, v, mean_field: bool = False) -> float:
    """Sample average of the screening exponential over clean samples."""
    Z = np.atleast_2d(np.asarray(samples))
    if Z.shape[0] == 0 or Z.size == 0:
        raise EmptyInputError("need at least one sample")
    others = other_vertices(Z.shape[1], target)
    e, _ = _screening_terms(Z, target, others, np.asarray(v, dtype=np.float64), mean_field)
    return float(e.mean())


def iso_gradient_empirical(samples, target: int, v, mean_field: bool = False) -> np.ndarray:
    """Ball gradient of the empirical objective."""
    Z = np.atleast_2d(np.asarray(samples))
    if Z.shape[0] == 0 or Z.size == 0:
        raise EmptyInputError("need at least one sample")
    others = other_vertices(Z.shape[1], target)
    e, feats = _screening_terms(Z, target, others, np.asarray(v, dtype=np.float64), mean_field)
    return -(e @ feats) / Z.shape[0]
