"""Named property suites run by ``isingscreen verify``.

Each suite returns a list of :class:`Check` rows with the measured value,
the limit it is compared against and whether it passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corruption import FLIP, MISSING, CorruptionChannel, corrupt_missing, estimate_p, missing_rate_deviation
from .errors import ThetaTooLargeError
from .estimators import estimator_bound, estimator_for
from .geometry import random_ball_point, random_simplex_point
from .model import IsingModel, new_model
from .objective import ScreeningProblem, iso_gradient_exact, lifted_value
from .optimizer import SmgConfig, regret_bound, smg_minimize
from .verification import (
    binomial_tv_bound,
    binomial_tv_exact,
    exact_estimator_expectation,
    finite_difference_gradient,
    rsc_gap,
)


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{status}] {self.name}: {self.value:.3e} (limit {self.limit:.3e}){extra}"


def random_model(n: int, rng: np.random.Generator, max_width: float = 1.5,
                 theta_scale: float = 0.0, density: float = 0.8) -> IsingModel:
    """Random couplings (and optional field in [-theta_scale, theta_scale])
    rescaled so the width is uniform in [0.2, max_width]."""
    # redraw until at least one coupling survives so the width can be set
    while True:
        A = np.triu(rng.uniform(-1, 1, (n, n)) * (rng.random((n, n)) < density), 1)
        if n < 2 or np.any(A):
            break
    A = A + A.T
    theta = rng.uniform(-theta_scale, theta_scale, n) if theta_scale else np.zeros(n)
    width = float(np.max(np.abs(A).sum(axis=1) + np.abs(theta))) if n else 0.0
    target = rng.uniform(0.2, max_width)
    if width > 0:
        scale = target / width
        A, theta = A * scale, theta * scale
    return new_model(A, theta)


def _relative(diff: float, ref: float) -> float:
    return diff / max(1.0, ref)


def unbiasedness(kind: str, ps, rng: np.random.Generator, mean_field: bool = False,
                 ns=(2, 3, 4), models: int = 20, points: int = 5, tol: float = 1e-9) -> list[Check]:
    """E[G(w; X)] against the exact lifted gradient over a grid of models."""
    checks = []
    for n in ns:
        worst = 0.0
        witness = ""
        for _ in range(models):
            model = random_model(n, rng, theta_scale=0.3 if mean_field else 0.0)
            lam = max(model.lambda_width, 1e-3)
            for p in ps:
                channel = CorruptionChannel.uniform(kind, p, n)
                for _ in range(points):
                    target = int(rng.integers(n))
                    problem = ScreeningProblem(model, target, lambda_budget=lam, mean_field=mean_field)
                    w = random_simplex_point(2 * problem.dim + 1, lam, rng)
                    got = exact_estimator_expectation(model, channel, w, target, mean_field)
                    want = iso_gradient_exact(problem, w)
                    err = _relative(float(np.max(np.abs(got - want))), float(np.max(np.abs(want))))
                    if err > worst:
                        worst, witness = err, f"p={p} target={target}"
        label = f"unbiased {kind}{' mean-field' if mean_field else ''} n={n}"
        checks.append(Check(label, worst, tol, worst <= tol, witness))
    return checks


def norm_bounds(kind: str, rng: np.random.Generator, pairs: int = 10_000,
                mean_field: bool = False) -> list[Check]:
    """Sup-norm of random estimates against the certified cap."""
    estimate = estimator_for(kind, mean_field)
    p_hi = 0.49 if kind == FLIP else 0.9
    worst_ratio = 0.0
    over = 0.0
    for _ in range(pairs):
        n = int(rng.integers(2, 9))
        lam = rng.uniform(0.1, 2.0)
        p = rng.uniform(0, p_hi, n)
        dim = 2 * (n - 1 + int(mean_field)) + 1
        # sparse Dirichlet weights push mass onto few coordinates, near the cap
        w = lam * rng.dirichlet(np.full(dim, rng.choice([0.05, 0.3, 1.0])))
        if kind == FLIP:
            x = rng.choice(np.array([-1, 1], dtype=np.int8), n)
        else:
            x = rng.choice(np.array([-1, 0, 1], dtype=np.int8), n)
        B = estimator_bound(lam, float(p.max()), kind)
        g = float(np.max(np.abs(estimate(w, x, p, int(rng.integers(n))))))
        worst_ratio = max(worst_ratio, g / B)
        over = max(over, g - B)
    label = f"norm bound {kind}{' mean-field' if mean_field else ''}"
    return [Check(label, over, 1e-12, over <= 1e-12, f"max |G|/B = {worst_ratio:.4f}")]


def gradcheck(rng: np.random.Generator, points: int = 20, h: float = 1e-5, tol: float = 1e-6) -> list[Check]:
    """Analytic lifted gradient against central differences on n = 3 models."""
    worst = 0.0
    for _ in range(points):
        model = random_model(3, rng)
        lam = max(model.lambda_width, 1e-3)
        target = int(rng.integers(3))
        # the budget only guards inputs; widen it so w +- h stays admissible
        problem = ScreeningProblem(model, target, lambda_budget=lam + 1.0)
        w = random_simplex_point(5, lam, rng)
        fd = finite_difference_gradient(lambda x: lifted_value(problem, x), w, h)
        an = iso_gradient_exact(problem, w)
        worst = max(worst, float(np.max(np.abs(fd - an)) / np.max(np.abs(an))))
    return [Check(f"finite differences h={h:g}", worst, tol, worst <= tol)]


def rsc(rng: np.random.Generator, ns=(2, 3, 4), points: int = 1000) -> list[Check]:
    """Restricted strong convexity slack at random ball points."""
    checks = []
    for n in ns:
        worst = math.inf
        witness = ""
        for i in range(points):
            if i % 50 == 0:
                model = random_model(n, rng)
                lam = max(model.lambda_width, 1e-3)
            target = int(rng.integers(n))
            problem = ScreeningProblem(model, target, lambda_budget=lam)
            v = random_ball_point(n - 1, lam, rng, interior=bool(rng.random() < 0.5))
            gap = rsc_gap(problem, v)
            if gap < worst:
                worst, witness = gap, f"target={target} v={np.array2string(v, precision=4)}"
        checks.append(Check(f"rsc gap n={n}", worst, -1e-12, worst >= -1e-12, witness))
    return checks


def _quadratic_run(u_star: np.ndarray, B: float, T: int, delta: float, noise: float,
                   rng: np.random.Generator | None):
    k = u_star.size
    config = SmgConfig(radius_W=1.0, dim_k=k, iterations_T=T, grad_bound_B=B, confidence_delta=delta)

    def oracle(u, t):
        g = 2.0 * (u - u_star)
        if rng is not None:
            g = g + rng.uniform(-noise, noise, k)
        return np.clip(g, -B, B)

    trace = smg_minimize(config, oracle)
    gap = float(np.sum((trace.averaged_point - u_star) ** 2))
    return gap, config.regret_bound, trace


def regret(rng: np.random.Generator, runs: int = 50, T: int = 10_000, delta: float = 0.1,
           drift_steps: int = 1_000_000) -> list[Check]:
    """Quadratic c(u) = ||u - u*||^2 on Delta(1, 4) with B = 2."""
    B = 2.0
    u_star = np.array([0.1, 0.2, 0.3, 0.4])
    # |2(u_i - u*_i)| <= 2 * 0.9 on the simplex, leaving 0.2 for zero-mean noise
    noise = B - 2.0 * max(u_star.max(), 1 - u_star.min())
    det_gap, bound, _ = _quadratic_run(u_star, B, T, delta, 0.0, None)
    checks = [Check("regret deterministic", det_gap, bound, det_gap <= bound)]
    within = 0
    for _ in range(runs):
        gap, bound, _ = _quadratic_run(u_star, B, T, delta, noise, rng)
        within += gap <= bound
    need = math.ceil(0.9 * runs)
    checks.append(Check(f"regret noisy ({within}/{runs} within bound)", float(within), float(need),
                        within >= need))
    if drift_steps:
        _, _, trace = _quadratic_run(u_star, B, drift_steps, delta, noise, rng)
        checks.append(Check(f"mass drift over {drift_steps} steps", trace.iterate_l1_drift, 1e-9,
                            trace.iterate_l1_drift <= 1e-9 and trace.rescales == 0))
    return checks


def tv(rng: np.random.Generator, trials=(5, 10, 50), ps=(0.2, 0.5), deltas=(0.01, 0.05),
       concentration_trials: int = 100, m: int = 10_000, n: int = 8, p_true: float = 0.2) -> list[Check]:
    """Binomial TV bound on a grid, plus concentration of the missing-rate estimate."""
    checks = []
    for N in trials:
        for p in ps:
            for d in deltas:
                try:
                    bound = binomial_tv_bound(N, p, d)
                except ThetaTooLargeError as exc:  # vacuous cells are outside the grid
                    checks.append(Check(f"tv N={N} p={p} d={d} skipped", 0.0, 0.0, True, str(exc)))
                    continue
                exact = binomial_tv_exact(N, p, p + d)
                checks.append(Check(f"tv N={N} p={p} d={d}", exact, bound, exact <= bound))
    eps = missing_rate_deviation(p_true, m, n, 0.01)
    ones = np.ones((m, n), dtype=np.int8)
    inside = 0
    for _ in range(concentration_trials):
        p_hat = estimate_p(corrupt_missing(ones, p_true, rng))
        inside += abs(p_hat - p_true) <= eps
    need = math.ceil(0.98 * concentration_trials)
    checks.append(Check(f"p-hat within {eps:.4f} ({inside}/{concentration_trials})", float(inside),
                        float(need), inside >= need))
    return checks


SUITES = {
    "unbiased": lambda rng: (unbiasedness(MISSING, (0.1, 0.3), rng)
                             + unbiasedness(FLIP, (0.1, 0.4), rng)
                             + unbiasedness(MISSING, (0.1, 0.3), rng, mean_field=True)),
    "rsc": rsc,
    "regret": regret,
    "tv": tv,
    "gradcheck": gradcheck,
}
