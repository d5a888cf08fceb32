"""Deterministic oracles for checking the estimators and objective exactly.

Everything here enumerates finite sets (spin configurations, corruption
masks, binomial supports) instead of sampling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .corruption import FLIP, MISSING, CorruptionChannel
from .errors import NonFiniteError, ThetaTooLargeError, TooLargeError
from .estimators import estimator_for
from .model import ExactDistribution, IsingModel, all_configurations, exact_probabilities
from .objective import ScreeningProblem, iso_gradient_ball, iso_value_exact, true_minimizer


@dataclass(frozen=True)
class EnumerationBudget:
    max_spin_states: int = 2**12
    max_mask_states: int = 2**12

    def __post_init__(self):
        if self.max_spin_states <= 0 or self.max_mask_states <= 0:
            raise ValueError("enumeration caps must be positive")


def _masks(channel: CorruptionChannel) -> tuple[np.ndarray, np.ndarray]:
    """Every corruption mask with its probability.

    Missing masks are 0/1 (0 = lost); flip masks are -1/+1 (-1 = flipped).
    """
    n = channel.p.size
    kept = all_configurations(n) > 0
    p = channel.p
    prob = np.prod(np.where(kept, 1.0 - p, p), axis=1)
    if channel.kind == MISSING:
        return kept.astype(np.int8), prob
    return np.where(kept, 1, -1).astype(np.int8), prob


def exact_estimator_expectation(
    model: IsingModel,
    channel: CorruptionChannel,
    w,
    target: int,
    mean_field: bool = False,
    budget: EnumerationBudget = EnumerationBudget(),
) -> np.ndarray:
    """E[G(w; X)] over the model and the corruption channel, by enumeration.

    Each G is evaluated through the public estimator on the explicit
    corrupted vector ``x = mask * z``; nothing is cached between calls.
    """
    n = model.n
    if 2**n > budget.max_spin_states or 2**n > budget.max_mask_states:
        raise TooLargeError(f"n={n} exceeds the enumeration budget")
    if channel.p.size != n:
        raise ValueError("channel size does not match the model")
    estimate = estimator_for(channel.kind, mean_field)
    dist = exact_probabilities(model)
    masks, mask_prob = _masks(channel)
    total = np.zeros(np.asarray(w).size)
    for z, pz in zip(dist.configurations, dist.probabilities):
        for c, pc in zip(masks, mask_prob):
            if pc == 0.0:
                continue
            total += (pz * pc) * estimate(w, c * z, channel.p, target)
    return total


def finite_difference_gradient(f: Callable[[np.ndarray], float], v, h: float = 1e-5) -> np.ndarray:
    """Central differences ``(f(v + h e_i) - f(v - h e_i)) / 2h``."""
    if h <= 0:
        raise ValueError("step must be positive")
    v = np.asarray(v, dtype=np.float64)
    g = np.empty_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = h
        g[i] = (f(v + e) - f(v - e)) / (2 * h)
    if not np.all(np.isfinite(g)):
        raise NonFiniteError("non-finite finite-difference gradient")
    return g


def rsc_constant(lam: float) -> float:
    return math.exp(-3 * lam) / (1 + lam)


def rsc_gap(problem: ScreeningProblem, v) -> float:
    """Slack in the restricted strong convexity inequality at ``v``.

    ``S(v) - S(v*) - grad S(v*).(v - v*) - c(lambda) ||v - v*||_inf^2`` with
    ``c(lambda) = exp(-3 lambda) / (1 + lambda)``; the sup-norm skips the
    intercept in mean-field mode. Nonnegative whenever the inequality holds.
    """
    v = problem.check_ball(v)
    v_star = true_minimizer(problem)
    diff = v - v_star
    edge_part = diff[: problem.n - 1]
    quad = rsc_constant(problem.lambda_budget) * float(np.max(np.abs(edge_part), initial=0.0)) ** 2
    linear = float(iso_gradient_ball(problem, v_star) @ diff)
    return iso_value_exact(problem, v) - iso_value_exact(problem, v_star) - linear - quad


def min_conditional_probability(dist: ExactDistribution, vertex: int, subset) -> float:
    """min over z_S of min(Pr[Z_v = 1 | z_S], Pr[Z_v = -1 | z_S])."""
    subset = list(subset)
    Z = dist.configurations
    P = dist.probabilities
    worst = 1.0
    for zs in itertools.product((-1, 1), repeat=len(subset)):
        sel = np.all(Z[:, subset] == np.array(zs, dtype=np.int8), axis=1) if subset else np.ones(len(P), bool)
        mass = P[sel].sum()
        if mass == 0:
            continue
        plus = P[sel & (Z[:, vertex] == 1)].sum() / mass
        worst = min(worst, plus, 1 - plus)
    return worst


def _log_binomial_pmf(trials: int, p: float) -> np.ndarray:
    """log pmf of Bin(trials, p) by ratio recursion outward from the mode."""
    k = np.arange(trials + 1)
    if p == 0.0 or p == 1.0:
        out = np.full(trials + 1, -np.inf)
        out[0 if p == 0.0 else trials] = 0.0
        return out
    mode = min(trials, int(math.floor((trials + 1) * p)))
    log_mode = (math.lgamma(trials + 1) - math.lgamma(mode + 1) - math.lgamma(trials - mode + 1)
                + mode * math.log(p) + (trials - mode) * math.log1p(-p))
    odds = math.log(p) - math.log1p(-p)
    # log pmf(k+1) - log pmf(k) = log((n - k) / (k + 1)) + log(p / (1 - p))
    up = np.log(trials - k[:-1]) - np.log(k[:-1] + 1) + odds
    out = np.empty(trials + 1)
    out[mode] = log_mode
    if mode < trials:
        out[mode + 1:] = log_mode + np.cumsum(up[mode:])
    if mode > 0:
        out[:mode] = log_mode - np.cumsum(up[:mode][::-1])[::-1]
    return out


def binomial_pmf(trials: int, p: float) -> np.ndarray:
    return np.exp(_log_binomial_pmf(trials, p))


def binomial_tv_exact(trials: int, p: float, q: float) -> float:
    """Total variation distance between Bin(trials, p) and Bin(trials, q)."""
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if trials < 0 or trials > 10**5:
        raise ValueError("trials must lie in [0, 1e5]")
    if p == q:
        return 0.0
    return 0.5 * float(np.abs(binomial_pmf(trials, p) - binomial_pmf(trials, q)).sum())


def binomial_tv_bound(trials: int, p: float, delta: float) -> float:
    """(sqrt(e) / 2) * t / (1 - t)^2 with t = delta * sqrt((trials + 2) / (2 p (1 - p))).

    Raises :class:`ThetaTooLargeError` when ``t >= 1`` (no finite bound).
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if not 0 < delta < 1 - p:
        raise ValueError("delta must lie in (0, 1 - p)")
    t = delta * math.sqrt((trials + 2) / (2 * p * (1 - p)))
    if t >= 1:
        raise ThetaTooLargeError(f"theta = {t} >= 1")
    return math.sqrt(math.e) / 2 * t / (1 - t) ** 2
