"""Unbiased single-sample gradient estimates for corrupted observations.

Each estimator maps a simplex point ``w`` and one corrupted sample ``x`` to a
vector ``G`` with ``G[i] = -G[i + k] = g_i`` and a zero slack coordinate,
such that ``E[G] = grad of the lifted screening objective`` when ``x`` comes
from the matching channel with the stated failure probabilities.

Missing data (``x_j = 0`` when lost)::

    g_i = -(x_t / (1 - p_t)) * (e^{-v_i x_t x_i} x_i / (1 - p_i))
          * prod_{j != i, t} (e^{-v_j x_t x_j} - p_j) / (1 - p_j)

Flipped data: each factor ``e^{a Z_j}`` is replaced by ``sigma(p_j, a, X_j)``,
the coordinate's own factor ``Z_i e^{a Z_i}`` by
``X_i ((1 - p_i) e^{a X_i} + p_i e^{-a X_i}) / (1 - 2 p_i)``, and the
target's sign is debiased by mixing the estimates at ``+w`` and ``-w``.
All coordinates share one prefix/suffix product pass, so a call is O(n).
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .corruption import FLIP, MISSING, check_probabilities
from .errors import BadDimensionError, BadProbabilityError, WrongChannelError
from .geometry import simplex_to_ball
from .objective import other_vertices


def lift(coeffs: np.ndarray) -> np.ndarray:
    """``(c, -c, 0)``: the simplex gradient for ball-coordinate estimates ``c``."""
    return np.concatenate([coeffs, -coeffs, [0.0]])


def _prepare(w, x, p, target: int, kind: str, extra: int):
    x = np.asarray(x, dtype=np.int8).ravel()
    n = x.size
    p = np.asarray(p, dtype=np.float64)
    p = np.full(n, float(p)) if p.ndim == 0 else p.ravel()
    if p.size != n:
        raise BadProbabilityError(f"expected {n} failure probabilities, got {p.size}")
    check_probabilities(kind, p)
    if not np.all(np.isin(x, (-1, 0, 1))):
        raise WrongChannelError("sample entries must be -1, 0 or +1")
    if kind == FLIP and np.any(x == 0):
        raise WrongChannelError("flipped samples cannot contain missing entries")
    if not 0 <= target < n:
        raise ValueError(f"target {target} out of range for n={n}")
    v = simplex_to_ball(w)
    if v.size != n - 1 + extra:
        raise BadDimensionError(f"simplex point has dimension {2 * v.size + 1}, "
                                f"expected {2 * (n - 1 + extra) + 1}")
    return v, x, np.ascontiguousarray(p), other_vertices(n, target)


def g_miss(w, x, p, target: int) -> np.ndarray:
    """Missing-data estimate; ``w`` has dimension ``2(n-1) + 1``."""
    v, x, p, others = _prepare(w, x, p, target, MISSING, 0)
    out = np.empty(v.size)
    _kernels.miss_coefficients(v, x, p, target, others, False, out)
    return lift(out)


def g_miss_meanfield(w, x, p, target: int) -> np.ndarray:
    """Missing-data estimate with an intercept; ``w`` has dimension ``2n + 1``.

    The intercept sits after the edge weights: coordinates ``n - 1`` and
    ``2n - 1`` of ``w``.
    """
    v, x, p, others = _prepare(w, x, p, target, MISSING, 1)
    out = np.empty(v.size)
    _kernels.miss_coefficients(v, x, p, target, others, True, out)
    return lift(out)


def g_flip(w, x, p, target: int) -> np.ndarray:
    """Flipped-data estimate; ``w`` has dimension ``2(n-1) + 1``."""
    v, x, p, others = _prepare(w, x, p, target, FLIP, 0)
    out = np.empty(v.size)
    _kernels.flip_coefficients(v, x, p, target, others, out)
    return lift(out)


def sigma(p, a, x):
    """((1 - p) e^{a x} - p e^{-a x}) / (1 - 2p), unbiased for e^{a z} under flips."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p < 0) | (p >= 0.5)):
        raise BadProbabilityError(f"sigma needs p in [0, 1/2), got {p}")
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = ((1 - p) * np.exp(a * x) - p * np.exp(-a * x)) / (1 - 2 * p)
    return out if out.ndim else float(out)


def estimator_bound(lam: float, p_max: float, kind: str) -> float:
    """Sup-norm cap on the estimates for ``||v||_1 <= lam``.

    Missing: ``exp(lam / (1 - p)) / (1 - p)^2``. Flip: the same form with
    ``1 - 2p`` in place of ``1 - p``.
    """
    if kind == MISSING:
        check_probabilities(MISSING, p_max)
        q = 1.0 - p_max
    elif kind == FLIP:
        check_probabilities(FLIP, p_max)
        q = 1.0 - 2.0 * p_max
    else:
        raise WrongChannelError(f"unknown channel {kind!r}")
    return math.exp(lam / q) / q**2


def estimator_for(kind: str, mean_field: bool = False):
    if kind == MISSING:
        return g_miss_meanfield if mean_field else g_miss
    if kind == FLIP:
        if mean_field:
            raise NotImplementedError("mean-field estimates are only available for missing data")
        return g_flip
    raise WrongChannelError(f"unknown channel {kind!r}")
