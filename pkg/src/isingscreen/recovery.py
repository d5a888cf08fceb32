"""Graph recovery from corrupted samples.

Each vertex runs multiplicative gradient descent on its lifted screening
objective, drawing sample ``t`` at iteration ``t``; all vertices reuse the
same ``T`` samples. Directed estimates are combined into an undirected edge
set by thresholding at ``beta / 2``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .corruption import FLIP, MISSING, CorruptionChannel, SampleSet, estimate_p, missing_rate_deviation
from .errors import EmptyInputError, GradientBoundViolated, NonFiniteError, StreamExhaustedError, WrongChannelError
from .estimators import estimator_bound, estimator_for
from .geometry import simplex_to_ball
from .model import IsingModel
from .objective import other_vertices
from .optimizer import SmgConfig, default_step_size, smg_minimize


@dataclass(frozen=True)
class RecoveryConfig:
    """Settings shared by every vertex.

    ``p`` may be a scalar or per-vertex vector; leave it as None for the
    unknown-rate pipeline. ``iterations`` of None uses every available
    sample. ``rule`` combines the two directed tests: ``"or"`` or ``"and"``.
    """

    lambda_budget: float
    beta_threshold: float
    kind: str = MISSING
    p: float | np.ndarray | None = 0.0
    iterations: int | None = None
    step_eta: float | str = "auto"
    confidence_delta: float = 0.1
    mean_field: bool = False
    rule: str = "or"

    def __post_init__(self):
        if self.lambda_budget <= 0:
            raise ValueError("lambda must be positive")
        if self.beta_threshold <= 0:
            raise ValueError("beta must be positive")
        if self.kind not in (MISSING, FLIP):
            raise WrongChannelError(f"unknown channel {self.kind!r}")
        if self.rule not in ("or", "and"):
            raise ValueError("rule must be 'or' or 'and'")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not 0 < self.confidence_delta < 1:
            raise ValueError("confidence_delta must lie in (0, 1)")
        if self.mean_field and self.kind == FLIP:
            raise NotImplementedError("mean-field recovery is only available for missing data")

    def channel(self, n: int) -> CorruptionChannel:
        if self.p is None:
            raise ValueError("failure probabilities are unknown; estimate them first")
        p = np.asarray(self.p, dtype=np.float64)
        return CorruptionChannel(self.kind, np.full(n, float(p)) if p.ndim == 0 else p)

    def with_p(self, p) -> "RecoveryConfig":
        return replace(self, p=p)


@dataclass
class RecoveryResult:
    """Directed per-vertex estimates and the undirected graph built from them.

    ``per_vertex_weights[u]`` is ordered over the vertices other than ``u``
    (intercept last in mean-field mode); ``directed[u, j]`` is the same data
    laid out as an ``n x n`` matrix with a zero diagonal.
    """

    per_vertex_weights: np.ndarray
    directed: np.ndarray
    edge_set: set
    weight_estimates: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.directed.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        return [(i, j, float(self.weight_estimates[i, j])) for i, j in sorted(self.edge_set)]


def _as_rows(samples, T: int | None, n: int | None = None) -> np.ndarray:
    """First ``T`` samples as a contiguous int8 array."""
    if isinstance(samples, SampleSet):
        samples = samples.values
    if isinstance(samples, np.ndarray):
        X = np.atleast_2d(samples)
        if T is None:
            T = X.shape[0]
        if X.shape[0] < T:
            raise StreamExhaustedError(f"need {T} samples, only {X.shape[0]} available")
        X = X[:T]
    else:
        if T is None:
            raise ValueError("iterations must be set when reading from a stream")
        rows = list(itertools.islice(iter(samples), T))
        if len(rows) < T:
            raise StreamExhaustedError(f"need {T} samples, stream ended after {len(rows)}")
        X = np.array(rows)
    if X.shape[0] == 0:
        raise EmptyInputError("no samples")
    if n is not None and X.shape[1] != n:
        raise ValueError(f"samples have {X.shape[1]} coordinates, expected {n}")
    return np.ascontiguousarray(X, dtype=np.int8)


def _check_channel(X: np.ndarray, kind: str) -> None:
    if kind == FLIP and np.any(X == 0):
        raise WrongChannelError("flip-channel recovery got missing entries")


def step_size_for(config: RecoveryConfig, n: int, T: int) -> tuple[float, float]:
    """``(eta, B)`` for one vertex's run."""
    channel = config.channel(n)
    B = estimator_bound(config.lambda_budget, channel.p_max, config.kind)
    k = 2 * (n - 1 + int(config.mean_field)) + 1
    eta = default_step_size(B, k, T) if config.step_eta == "auto" else float(config.step_eta)
    return eta, B


def _run_vertex(X: np.ndarray, target: int, config: RecoveryConfig, backend: str):
    n = X.shape[1]
    T = X.shape[0]
    channel = config.channel(n)
    eta, B = step_size_for(config, n, T)
    lam = config.lambda_budget
    if backend == "python":
        estimate = estimator_for(config.kind, config.mean_field)
        dim = 2 * (n - 1 + int(config.mean_field)) + 1
        smg = SmgConfig(radius_W=lam, dim_k=dim, iterations_T=T, grad_bound_B=B, step_eta=eta)
        trace = smg_minimize(smg, lambda u, t: estimate(u, X[t], channel.p, target))
        return simplex_to_ball(trace.averaged_point), trace.iterate_l1_drift, trace.rescales
    if backend != "compiled":
        raise ValueError(f"unknown backend {backend!r}")
    kind = _kernels.MISSING if config.kind == MISSING else _kernels.FLIP
    avg, _, drift, rescales, status, step = _kernels.smg_screening(
        X, target, other_vertices(n, target), np.ascontiguousarray(channel.p, dtype=np.float64),
        kind, config.mean_field, float(lam), float(eta), float(B))
    if status == _kernels.BOUND_VIOLATED:
        raise GradientBoundViolated(f"vertex {target}, step {step}: estimate exceeded B = {B}")
    if status == _kernels.NON_FINITE:
        raise NonFiniteError(f"vertex {target}, step {step}: non-finite weights")
    return simplex_to_ball(avg), drift, rescales


def recover_neighborhood(samples, target: int, config: RecoveryConfig, backend: str = "compiled") -> np.ndarray:
    """Estimated weights of ``target``'s row, ordered over the other vertices.

    ``samples`` is an array, :class:`SampleSet` or iterator of vectors; the
    first ``config.iterations`` of them are used, one per step.
    """
    X = _as_rows(samples, config.iterations)
    _check_channel(X, config.kind)
    v, _, _ = _run_vertex(X, target, config, backend)
    return v


def assemble_graph(per_vertex: np.ndarray, beta: float, rule: str = "or") -> tuple[np.ndarray, set, np.ndarray]:
    """Directed matrix, edge set and symmetric weights from per-vertex rows."""
    n = per_vertex.shape[0]
    D = np.zeros((n, n))
    for u in range(n):
        D[u, other_vertices(n, u)] = per_vertex[u, :n - 1]
    hit = np.abs(D) >= beta / 2
    both = (hit | hit.T) if rule == "or" else (hit & hit.T)
    both = np.triu(both, 1)
    edge_set = {(int(i), int(j)) for i, j in zip(*np.nonzero(both))}
    A_hat = np.zeros((n, n))
    for i, j in edge_set:
        A_hat[i, j] = A_hat[j, i] = 0.5 * (D[i, j] + D[j, i])
    return D, edge_set, A_hat


def recover_graph(samples, config: RecoveryConfig, backend: str = "compiled") -> RecoveryResult:
    """Run every vertex on the same samples and threshold at ``beta / 2``."""
    X = _as_rows(samples, config.iterations)
    _check_channel(X, config.kind)
    n = X.shape[1]
    rows = []
    seconds = []
    drift = 0.0
    rescales = 0
    for u in range(n):
        start = time.perf_counter()
        v, d, r = _run_vertex(X, u, config, backend)
        seconds.append(time.perf_counter() - start)
        rows.append(v)
        drift = max(drift, d)
        rescales += r
    per_vertex = np.array(rows)
    D, edge_set, A_hat = assemble_graph(per_vertex, config.beta_threshold, config.rule)
    eta, B = step_size_for(config, n, X.shape[0])
    diagnostics = {
        "samples_used": X.shape[0],
        "vertex_seconds": seconds,
        "step_eta": eta,
        "grad_bound": B,
        "max_l1_drift": drift,
        "rescales": rescales,
    }
    return RecoveryResult(per_vertex, D, edge_set, A_hat, diagnostics)


def recover_graph_unknown_p(estimation_samples, main_samples, config: RecoveryConfig,
                            backend: str = "compiled") -> RecoveryResult:
    """Estimate a shared missing rate from separate samples, then recover.

    The estimate and its deviation bound at ``config.confidence_delta`` are
    stored in the diagnostics as ``p_hat`` and ``p_deviation_bound``.
    """
    if config.kind != MISSING:
        raise WrongChannelError("the missing rate can only be estimated for missing data")
    for s in (estimation_samples, main_samples):
        if isinstance(s, SampleSet) and s.channel == FLIP:
            raise WrongChannelError("flipped samples given to the unknown-p pipeline")
    est = estimation_samples.values if isinstance(estimation_samples, SampleSet) else np.asarray(estimation_samples)
    main = main_samples.values if isinstance(main_samples, SampleSet) else main_samples
    if isinstance(main, np.ndarray) and np.shares_memory(est, main):
        raise ValueError("estimation and main samples must be disjoint")
    p_hat = estimate_p(est)
    result = recover_graph(main, config.with_p(p_hat), backend)
    m, n = np.atleast_2d(est).shape
    result.diagnostics["p_hat"] = p_hat
    result.diagnostics["p_deviation_bound"] = missing_rate_deviation(p_hat, m, n, config.confidence_delta)
    return result


def iteration_inflation(lam: float, p_max: float, kind: str) -> float:
    """Factor by which T grows relative to clean data at the same accuracy.

    The guarantee needs T proportional to B^2, so this is
    ``(B(p) / B(0))^2`` with ``B`` the estimator cap.
    """
    return (estimator_bound(lam, p_max, kind) / estimator_bound(lam, 0.0, kind)) ** 2


def sample_complexity_guidance(lam: float, n: int, delta: float, eps: float, C: float) -> float:
    """lambda^4 log(n / delta) exp(C lambda) / eps^4; the constant C is not known."""
    return lam**4 * math.log(n / delta) * math.exp(C * lam) / eps**4


def max_weight_error(result: RecoveryResult, model: IsingModel) -> float:
    """Largest |estimate - truth| over all directed off-diagonal entries."""
    n = model.n
    off = ~np.eye(n, dtype=bool)
    return float(np.max(np.abs(result.directed - model.A)[off]))


def declared_edge_error(result: RecoveryResult, model: IsingModel) -> float:
    """Largest |A_hat_ij - A_ij| over declared edges (0 when none)."""
    if not result.edge_set:
        return 0.0
    return float(max(abs(result.weight_estimates[i, j] - model.A[i, j]) for i, j in result.edge_set))
