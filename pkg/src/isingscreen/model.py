"""Ising models on {-1, +1}^n: construction, exact enumeration and sampling.

The joint law is

    Pr[z] = exp(sum_{i<j} A_ij z_i z_j + sum_i theta_i z_i) / Z

with ``A`` stored as a full symmetric matrix, so each unordered edge
contributes once to the exponent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatchError,
    FileFormatError,
    NonSymmetricError,
    NonzeroDiagonalError,
    TooLargeError,
)

ENUMERATION_CAP = 20


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class IsingModel:
    """Pairwise binary model with interaction matrix ``A`` and field ``theta``.

    Use :func:`new_model` to build one; it validates the inputs and fills in
    the derived width and minimum edge weight.
    """

    A: np.ndarray
    theta: np.ndarray
    lambda_width: float
    beta_min: float | None

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(i, j, weight)`` with ``i < j``."""
        i, j = np.nonzero(np.triu(self.A, 1))
        return [(int(a), int(b), float(self.A[a, b])) for a, b in zip(i, j)]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.edges()}

    def neighbors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.A[u])


def new_model(A, theta=None) -> IsingModel:
    """Validate ``(A, theta)`` and return an :class:`IsingModel`.

    Raises
    ------
    DimensionMismatchError
        ``A`` is not square or ``theta`` has the wrong length.
    NonSymmetricError, NonzeroDiagonalError
        ``A`` is not a valid interaction matrix.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"A must be square, got shape {A.shape}")
    n = A.shape[0]
    theta = np.zeros(n) if theta is None else np.asarray(theta, dtype=np.float64).ravel()
    if theta.shape != (n,):
        raise DimensionMismatchError(f"theta has length {theta.size}, expected {n}")
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(theta)):
        raise ValueError("A and theta must be finite")
    if np.any(A != A.T):
        raise NonSymmetricError("A must be exactly symmetric")
    if np.any(np.diag(A) != 0):
        raise NonzeroDiagonalError("A must have a zero diagonal")

    width = float(np.max(np.abs(A).sum(axis=1) + np.abs(theta))) if n else 0.0
    nz = np.abs(A[A != 0])
    beta = float(nz.min()) if nz.size else None
    return IsingModel(_frozen(A), _frozen(theta), width, beta)


def model_from_edges(n: int, edges, theta=None) -> IsingModel:
    """Build a model from ``(i, j, weight)`` triples."""
    A = np.zeros((n, n))
    for i, j, w in edges:
        A[i, j] = A[j, i] = w
    return new_model(A, theta)


def all_configurations(n: int) -> np.ndarray:
    """Every point of {-1, +1}^n as rows of an int8 array.

    Row ``r`` has ``z_i = +1`` iff bit ``n-1-i`` of ``r`` is set, which is the
    same order as ``itertools.product([-1, 1], repeat=n)``.
    """
    r = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (r >> np.arange(n - 1, -1, -1, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


@dataclass(frozen=True)
class ExactDistribution:
    """Full probability table of a small model."""

    n: int
    probabilities: np.ndarray
    partition_value: float
    configurations: np.ndarray = field(repr=False)

    def index_of(self, z) -> int:
        bits = (np.asarray(z) > 0).astype(np.int64)
        return int(bits @ (1 << np.arange(self.n - 1, -1, -1, dtype=np.int64)))

    def prob(self, z) -> float:
        return float(self.probabilities[self.index_of(z)])

    def expect(self, values: np.ndarray) -> np.ndarray:
        """``E[f(Z)]`` given ``f`` evaluated on every configuration (axis 0)."""
        return np.tensordot(self.probabilities, values, axes=(0, 0))


def exact_probabilities(model: IsingModel, cap: int = ENUMERATION_CAP) -> ExactDistribution:
    n = model.n
    if n > cap:
        raise TooLargeError(f"n={n} exceeds the enumeration cap {cap}")
    Z = all_configurations(n)
    Zf = Z.astype(np.float64)
    energy = 0.5 * np.einsum("ki,ij,kj->k", Zf, model.A, Zf) + Zf @ model.theta
    shift = energy.max()
    weights = np.exp(energy - shift)
    total = weights.sum()
    Z.setflags(write=False)
    return ExactDistribution(
        n=n,
        probabilities=_frozen(weights / total),
        partition_value=float(total * np.exp(shift)),
        configurations=Z,
    )


def sample_exact(dist: ExactDistribution, rng: np.random.Generator, size: int | None = None):
    """Inverse-CDF draws from the enumerated table.

    Returns one int8 vector when ``size`` is None, else a ``(size, n)`` array.
    """
    cdf = np.cumsum(dist.probabilities)
    cdf[-1] = 1.0
    m = 1 if size is None else int(size)
    idx = np.searchsorted(cdf, rng.random(m), side="right")
    # an exactly-zero probability tail would otherwise be reachable at u ~ 1
    idx = np.minimum(idx, len(cdf) - 1)
    out = dist.configurations[idx].copy()
    return out[0] if size is None else out


def _burned_in_chain(model: IsingModel, rng: np.random.Generator, burn_in: int | None, thin: int):
    n = model.n
    if burn_in is None:
        burn_in = 100 * n
    if burn_in < 0 or thin < 1:
        raise ValueError("need burn_in >= 0 and thin >= 1")
    A = np.ascontiguousarray(model.A)
    theta = np.ascontiguousarray(model.theta)
    state = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
    if burn_in:
        _kernels.gibbs_sweeps(state, A, theta, rng.random((burn_in, n)), burn_in,
                              np.empty((1, n), dtype=np.int8))
    return state, A, theta


def gibbs_sample(
    model: IsingModel,
    rng: np.random.Generator,
    burn_in: int | None = None,
    thin: int = 10,
    block: int = 4096,
) -> Iterator[np.ndarray]:
    """Endless stream of systematic-scan Gibbs samples.

    One sample is emitted per ``thin`` full sweeps after ``burn_in`` sweeps
    (default ``100 * n``). The stream matches :func:`gibbs_samples` for the
    same seed since uniforms are drawn from ``rng`` in order.
    """
    state, A, theta = _burned_in_chain(model, rng, burn_in, thin)
    n = model.n
    while True:
        out = np.empty((block, n), dtype=np.int8)
        _kernels.gibbs_sweeps(state, A, theta, rng.random((block * thin, n)), thin, out)
        yield from out


def gibbs_samples(model: IsingModel, count: int, rng: np.random.Generator,
                  burn_in: int | None = None, thin: int = 10) -> np.ndarray:
    """``count`` Gibbs samples stacked into an ``(count, n)`` int8 array."""
    state, A, theta = _burned_in_chain(model, rng, burn_in, thin)
    out = np.empty((count, model.n), dtype=np.int8)
    step = 65536
    for start in range(0, count, step):
        chunk = out[start:start + step]
        _kernels.gibbs_sweeps(state, A, theta, rng.random((len(chunk) * thin, model.n)), thin, chunk)
    return out


def conditional_plus_probability(model: IsingModel, i: int, z) -> float:
    """Pr[Z_i = +1 | Z_{-i} = z_{-i}] from the single-site formula."""
    z = np.asarray(z, dtype=np.float64)
    local = model.A[i] @ z + model.theta[i]
    return float(1.0 / (1.0 + np.exp(-2.0 * local)))


# -- model files -------------------------------------------------------------

def model_to_dict(model: IsingModel) -> dict:
    return {
        "n": model.n,
        "theta": [float(t) for t in model.theta],
        "edges": [{"i": i, "j": j, "weight": w} for i, j, w in model.edges()],
    }


def model_from_dict(data: dict) -> IsingModel:
    try:
        n = int(data["n"])
        theta = [float(t) for t in data.get("theta", [0.0] * n)]
        raw = data["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed model description: {exc}") from exc
    if len(theta) != n:
        raise FileFormatError(f"theta has {len(theta)} entries, expected {n}")
    seen = set()
    edges = []
    for e in raw:
        i, j, w = int(e["i"]), int(e["j"]), float(e["weight"])
        if i == j:
            raise FileFormatError(f"self edge at vertex {i}")
        if not (0 <= i < j < n):
            raise FileFormatError(f"edge ({i}, {j}) must satisfy 0 <= i < j < {n}")
        if (i, j) in seen:
            raise FileFormatError(f"duplicate edge ({i}, {j})")
        seen.add((i, j))
        edges.append((i, j, w))
    return model_from_edges(n, edges, theta)


def write_model(model: IsingModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def read_model(path) -> IsingModel:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    return model_from_dict(data)
