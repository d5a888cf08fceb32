"""Maps between the l1 ball B(W, k) and the simplex Delta(W, 2k + 1).

A ball point ``w`` is split into positive parts, negative parts and a slack
coordinate ``W - ||w||_1``; going back takes the difference of the two
halves. Only ``simplex_to_ball(ball_to_simplex(w)) == w`` is a true round
trip, since the reverse direction forgets the common part of each pair.
"""

import numpy as np

from .errors import BadDimensionError, NormExceededError

NORM_TOL = 1e-12


def ball_to_simplex(w, radius: float) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64).ravel()
    norm = np.abs(w).sum()
    if norm > radius + NORM_TOL:
        raise NormExceededError(f"||w||_1 = {norm} exceeds radius {radius}")
    return np.concatenate([np.maximum(w, 0.0), np.maximum(-w, 0.0), [radius - norm]])


def simplex_to_ball(u, radius: float | None = None) -> np.ndarray:
    """Differences ``u_i - u_{i+k}`` for a point of odd dimension ``2k + 1``.

    When ``radius`` is given the point is checked for nonnegativity and
    total mass ``radius`` first.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    if u.size % 2 == 0:
        raise BadDimensionError(f"simplex points have odd dimension, got {u.size}")
    if radius is not None:
        check_simplex(u, radius)
    k = u.size // 2
    return u[:k] - u[k:2 * k]


def check_simplex(u, radius: float, tol: float = NORM_TOL) -> None:
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < -1e-15):
        raise NormExceededError("simplex point has negative coordinates")
    if abs(u.sum() - radius) > tol * max(1.0, radius):
        raise NormExceededError(f"simplex point sums to {u.sum()}, expected {radius}")


def random_ball_point(k: int, radius: float, rng: np.random.Generator, interior: bool = True) -> np.ndarray:
    """A point of B(radius, k): uniform simplex weights with random signs.

    With ``interior=False`` the point lies on the sphere ``||w||_1 = radius``.
    """
    # the extra Dirichlet component is the unused slack
    mass = rng.dirichlet(np.ones(k + 1 if interior else k))[:k]
    signs = rng.choice([-1.0, 1.0], size=k)
    return radius * signs * mass


def random_simplex_point(dim: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    return radius * rng.dirichlet(np.ones(dim))
