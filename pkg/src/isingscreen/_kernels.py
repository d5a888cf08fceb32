"""Compiled inner loops.

Everything here works on plain float64/int8 arrays and 0-based indices.
The public wrappers in ``estimators``, ``recovery`` and ``model`` validate
inputs before calling in.
"""

import numpy as np
from numba import njit

MISSING = 0
FLIP = 1

# status codes returned by smg_screening
OK = 0
BOUND_VIOLATED = 1
NON_FINITE = 2


@njit(cache=True)
def _exclusive_products(f, out):
    # out[i] = prod_{j != i} f[j], no division so exact zeros are harmless
    m = f.shape[0]
    acc = 1.0
    for i in range(m):
        out[i] = acc
        acc *= f[i]
    acc = 1.0
    for i in range(m - 1, -1, -1):
        out[i] *= acc
        acc *= f[i]


@njit(cache=True)
def miss_coefficients(v, x, p, target, others, mean_field, out):
    """Per-coordinate missing-data estimates written into ``out``.

    ``v`` holds the ball coordinates in the order of ``others`` followed by
    the intercept when ``mean_field`` is set. ``out`` has the length of ``v``.
    """
    m = others.shape[0]
    xt = float(x[target])
    for i in range(out.shape[0]):
        out[i] = 0.0
    if xt == 0.0:
        return
    lead = xt / (1.0 - p[target])
    if mean_field:
        lead *= np.exp(-v[m] * xt)
    shared = np.empty(m)
    excl = np.empty(m)
    for a in range(m):
        j = others[a]
        pj = p[j]
        shared[a] = (np.exp(-v[a] * xt * x[j]) - pj) / (1.0 - pj)
    _exclusive_products(shared, excl)
    for a in range(m):
        j = others[a]
        xj = float(x[j])
        if xj == 0.0:
            continue
        own = np.exp(-v[a] * xt * xj) * xj / (1.0 - p[j])
        out[a] = -lead * own * excl[a]
    if mean_field:
        total = 1.0
        for a in range(m):
            total *= shared[a]
        out[m] = -lead * total


@njit(cache=True)
def _flip_half(v, x, p, target, others, sign, out):
    # h^i for argument sign*w, written into out[:m]
    m = others.shape[0]
    xt = float(x[target])
    shared = np.empty(m)
    own = np.empty(m)
    excl = np.empty(m)
    for a in range(m):
        j = others[a]
        pj = p[j]
        e_pos = np.exp(-sign * v[a] * xt * x[j])
        e_neg = 1.0 / e_pos
        # sigma(p, a, x) for the shared factors; the coordinate's own factor
        # debiases x * exp(a x), which needs the opposite sign on the p term
        shared[a] = ((1.0 - pj) * e_pos - pj * e_neg) / (1.0 - 2.0 * pj)
        own[a] = x[j] * ((1.0 - pj) * e_pos + pj * e_neg) / (1.0 - 2.0 * pj)
    _exclusive_products(shared, excl)
    for a in range(m):
        out[a] = xt * own[a] * excl[a]


@njit(cache=True)
def flip_coefficients(v, x, p, target, others, out):
    m = others.shape[0]
    pt = p[target]
    h_pos = np.empty(m)
    h_neg = np.empty(m)
    _flip_half(v, x, p, target, others, 1.0, h_pos)
    _flip_half(v, x, p, target, others, -1.0, h_neg)
    for a in range(m):
        out[a] = -((1.0 - pt) * h_pos[a] + pt * h_neg[a]) / (1.0 - 2.0 * pt)


@njit(cache=True)
def smg_screening(X, target, others, p, kind, mean_field, radius, eta, bound):
    """Fused multiplicative-weights loop for one target vertex.

    Row ``t`` of ``X`` is the fresh sample for iteration ``t``. Returns
    ``(avg, final, max_drift, rescales, status, fail_step)``.
    """
    T = X.shape[0]
    k = others.shape[0] + (1 if mean_field else 0)
    dim = 2 * k + 1
    u = np.full(dim, radius / dim)
    avg = np.zeros(dim)
    v = np.empty(k)
    c = np.empty(k)
    max_drift = 0.0
    rescales = 0
    cap = bound * (1.0 + 1e-12) + 1e-12
    for t in range(T):
        for i in range(dim):
            avg[i] += u[i]
        for i in range(k):
            v[i] = u[i] - u[k + i]
        if kind == MISSING:
            miss_coefficients(v, X[t], p, target, others, mean_field, c)
        else:
            flip_coefficients(v, X[t], p, target, others, c)
        # C^t = u.g / W with g = (c, -c, 0)
        dot = 0.0
        for i in range(k):
            if abs(c[i]) > cap:
                return avg / T, u, max_drift, rescales, BOUND_VIOLATED, t
            dot += c[i] * v[i]
        shift = eta * dot / radius
        total = 0.0
        for i in range(k):
            u[i] *= 1.0 - eta * c[i] + shift
            u[k + i] *= 1.0 + eta * c[i] + shift
        u[2 * k] *= 1.0 + shift
        for i in range(dim):
            total += u[i]
        if not np.isfinite(total):
            return avg / T, u, max_drift, rescales, NON_FINITE, t
        drift = abs(total - radius)
        if drift > max_drift:
            max_drift = drift
        if drift > 1e-9 * radius:
            for i in range(dim):
                u[i] *= radius / total
            rescales += 1
    return avg / T, u, max_drift, rescales, OK, T


@njit(cache=True)
def gibbs_sweeps(state, A, theta, uniforms, thin, out):
    """Systematic-scan Gibbs; one row of ``out`` per ``thin`` sweeps.

    ``uniforms`` has shape (out_rows * thin, n); ``state`` is updated in place.
    """
    n = state.shape[0]
    rows = out.shape[0]
    sweep = 0
    for r in range(rows):
        for _ in range(thin):
            for i in range(n):
                field = theta[i]
                for j in range(n):
                    field += A[i, j] * state[j]
                # Pr[Z_i = +1 | rest] = 1 / (1 + exp(-2 field))
                if uniforms[sweep, i] * (1.0 + np.exp(-2.0 * field)) < 1.0:
                    state[i] = 1
                else:
                    state[i] = -1
            sweep += 1
        for i in range(n):
            out[r, i] = state[i]
