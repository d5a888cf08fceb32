"""Stochastic multiplicative gradient descent on the simplex Delta(W, k).

Starting from the uniform point, each step takes an unbiased gradient
estimate ``g`` and applies

    u_i <- u_i * (1 - eta * g_i + eta * (u . g) / W)

which keeps ``sum(u) = W`` and, for ``eta <= 1 / (8B)`` with
``||g||_inf <= B``, keeps every weight positive. The output is the average
of the iterates ``u^1 .. u^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GradientBoundViolated, NonFiniteError

DRIFT_TOL = 1e-9


def default_step_size(B: float, k: int, T: int) -> float:
    """min(1/(8B), sqrt(ln k / T) / (2B))."""
    if B <= 0 or k < 2 or T < 1:
        raise ValueError("need B > 0, k >= 2 and T >= 1")
    return min(1.0 / (8.0 * B), math.sqrt(math.log(k) / T) / (2.0 * B))


def regret_bound(B: float, W: float, k: int, T: int, delta: float) -> float:
    """High-probability gap ``c(u_bar) - c(u*)`` guaranteed after T steps."""
    return 4.0 * B * W * (math.sqrt(math.log(k) / T) + math.sqrt(2.0 * math.log(1.0 / delta) / T))


@dataclass(frozen=True)
class SmgConfig:
    radius_W: float
    dim_k: int
    iterations_T: int
    grad_bound_B: float
    step_eta: float | None = None
    confidence_delta: float = 0.1

    def __post_init__(self):
        if self.radius_W <= 0 or self.dim_k < 1 or self.iterations_T < 1 or self.grad_bound_B <= 0:
            raise ValueError("SMG needs W > 0, k >= 1, T >= 1 and B > 0")
        if self.step_eta is None:
            object.__setattr__(self, "step_eta",
                               default_step_size(self.grad_bound_B, max(self.dim_k, 2), self.iterations_T))
        if not 0 < self.step_eta <= 1.0 / (8.0 * self.grad_bound_B) * (1 + 1e-12):
            raise ValueError(f"step {self.step_eta} outside (0, 1/(8B)] for B = {self.grad_bound_B}")
        if not 0 < self.confidence_delta < 1:
            raise ValueError("confidence_delta must lie in (0, 1)")

    @property
    def regret_bound(self) -> float:
        return regret_bound(self.grad_bound_B, self.radius_W, self.dim_k,
                            self.iterations_T, self.confidence_delta)


@dataclass
class SmgTrace:
    averaged_point: np.ndarray
    final_point: np.ndarray
    iterate_l1_drift: float
    rescales: int = 0


def smg_minimize(config: SmgConfig, grad_oracle: Callable[[np.ndarray, int], np.ndarray]) -> SmgTrace:
    """Run T multiplicative steps.

    ``grad_oracle(u, t)`` returns the gradient estimate at the current point
    for step ``t`` (0-based); the optimizer itself draws no randomness.
    Mass drift is monitored; if it ever exceeds ``1e-9 W`` the iterate is
    rescaled once and the event counted.

    Raises
    ------
    GradientBoundViolated
        An estimate has sup-norm above ``B``, so positivity is no longer
        guaranteed.
    NonFiniteError
        A weight became inf or nan.
    """
    W, k, T = config.radius_W, config.dim_k, config.iterations_T
    eta, B = config.step_eta, config.grad_bound_B
    cap = B * (1 + 1e-12) + 1e-12
    u = np.full(k, W / k)
    total = np.zeros(k)
    drift = 0.0
    rescales = 0
    for t in range(T):
        total += u
        g = np.asarray(grad_oracle(u.copy(), t), dtype=np.float64)
        if g.shape != (k,):
            raise ValueError(f"oracle returned shape {g.shape}, expected ({k},)")
        if np.max(np.abs(g)) > cap:
            raise GradientBoundViolated(f"step {t}: ||g||_inf = {np.max(np.abs(g))} > B = {B}")
        u = u * (1.0 - eta * g + eta * (u @ g) / W)
        s = u.sum()
        if not np.isfinite(s):
            raise NonFiniteError(f"non-finite weights at step {t}")
        d = abs(s - W)
        drift = max(drift, d)
        if d > DRIFT_TOL * W:
            u *= W / s
            rescales += 1
    return SmgTrace(total / T, u, drift, rescales)
