import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_model
from isingscreen.corruption import FLIP, MISSING, CorruptionChannel
from isingscreen.errors import BadDimensionError, BadProbabilityError, WrongChannelError
from isingscreen.estimators import (
    estimator_bound,
    estimator_for,
    g_flip,
    g_miss,
    g_miss_meanfield,
    lift,
    sigma,
)
from isingscreen.geometry import ball_to_simplex, random_simplex_point, simplex_to_ball
from isingscreen.model import all_configurations, exact_probabilities, new_model
from isingscreen.objective import ScreeningProblem, iso_gradient_empirical, iso_gradient_exact, other_vertices
from isingscreen.verification import exact_estimator_expectation


# -- naive O(n^2) references, written straight from the formulas -------------

def naive_miss(v, x, p, t, intercept=None):
    others = other_vertices(len(x), t)
    x = x.astype(float)
    factor = [(math.exp(-vj * x[t] * x[j]) - p[j]) / (1 - p[j]) for vj, j in zip(v, others)]
    shift = 1.0 if intercept is None else math.exp(-intercept * x[t])
    g = []
    for a, i in enumerate(others):
        own = math.exp(-v[a] * x[t] * x[i]) * x[i] / (1 - p[i])
        rest = np.prod([f for b, f in enumerate(factor) if b != a])
        g.append(-(x[t] / (1 - p[t])) * own * rest * shift)
    if intercept is not None:
        g.append(-(x[t] / (1 - p[t])) * shift * np.prod(factor))
    return np.array(g)


def _sig(p, a, x):
    return ((1 - p) * math.exp(a * x) - p * math.exp(-a * x)) / (1 - 2 * p)


def _own(p, a, x):
    return x * ((1 - p) * math.exp(a * x) + p * math.exp(-a * x)) / (1 - 2 * p)


def naive_flip(v, x, p, t, own=_own):
    others = other_vertices(len(x), t)

    def h(i_pos, sign):
        out = float(x[t])
        for b, j in enumerate(others):
            a = -sign * v[b] * x[t]
            out *= own(p[j], a, x[j]) if b == i_pos else _sig(p[j], a, x[j])
        return out

    return np.array([-((1 - p[t]) * h(a, 1) + p[t] * h(a, -1)) / (1 - 2 * p[t]) for a in range(len(others))])


def literal_own_factor(p, a, x):
    # x_i * sigma(p_i, a, x_i): the factor read off the display without correction
    return x * _sig(p, a, x)


# -- worked values ------------------------------------------------------------

def test_missing_worked_value():
    w = ball_to_simplex([0.3], 0.3)
    g = g_miss(w, [1, 1], [0.2, 0.2], 1)
    assert g[0] == pytest.approx(-math.exp(-0.3) / 0.64, abs=1e-12)
    assert g[0] == pytest.approx(-1.15753, abs=1e-5)
    assert np.array_equal(g, [g[0], -g[0], 0.0])


def test_missing_coordinate_kills_estimate():
    w = ball_to_simplex([0.3], 0.3)
    assert np.array_equal(g_miss(w, [0, 1], [0.2, 0.2], 1), np.zeros(3))


def test_flip_worked_value():
    w = ball_to_simplex([0.3], 0.3)
    g = g_flip(w, [1, 1], [0.0, 0.25], 1)
    want = -(0.75 * math.exp(-0.3) + 0.25 * math.exp(0.3)) / 0.5
    assert g[0] == pytest.approx(want, abs=1e-12)
    assert g[0] == pytest.approx(-1.786157, abs=1e-6)


class TestSigma:
    def test_clean_limit(self):
        assert sigma(0.0, 0.7, -1) == pytest.approx(math.exp(-0.7))

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.49])
    def test_zero_argument(self, p):
        assert sigma(p, 0.0, 1) == pytest.approx(1.0)

    def test_worked_value(self):
        assert sigma(0.25, 0.3, 1) == pytest.approx(1.654379, abs=1e-6)

    def test_unbiased_for_exponential(self):
        p, a = 0.3, 0.8
        for z in (-1, 1):
            mean = (1 - p) * sigma(p, a, z) + p * sigma(p, a, -z)
            assert mean == pytest.approx(math.exp(a * z))

    def test_rejects_half(self):
        with pytest.raises(BadProbabilityError):
            sigma(0.5, 1.0, 1)


class TestBound:
    def test_missing_values(self):
        assert estimator_bound(1.0, 0.5, MISSING) == pytest.approx(4 * math.e**2)
        assert estimator_bound(1.0, 0.5, MISSING) == pytest.approx(29.556224, abs=1e-6)
        assert estimator_bound(0.0, 0.0, MISSING) == 1.0

    def test_flip_value(self):
        assert estimator_bound(1.0, 0.25, FLIP) == pytest.approx(29.556224, abs=1e-6)

    def test_rejects_bad_rate(self):
        with pytest.raises(BadProbabilityError):
            estimator_bound(1.0, 0.5, FLIP)
        with pytest.raises(WrongChannelError):
            estimator_bound(1.0, 0.1, "erase")


# -- agreement with the naive references -------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_missing_matches_naive(n, seed):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(n))
    p = rng.uniform(0, 0.9, n)
    lam = rng.uniform(0.1, 3)
    w = random_simplex_point(2 * (n - 1) + 1, lam, rng)
    x = rng.choice(np.array([-1, 0, 1], dtype=np.int8), n)
    g = g_miss(w, x, p, t)
    assert np.allclose(g, lift(naive_miss(simplex_to_ball(w), x, p, t)), rtol=1e-12, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_meanfield_matches_naive(n, seed):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(n))
    p = rng.uniform(0, 0.9, n)
    w = random_simplex_point(2 * n + 1, rng.uniform(0.1, 3), rng)
    x = rng.choice(np.array([-1, 0, 1], dtype=np.int8), n)
    v = simplex_to_ball(w)
    want = naive_miss(v[:-1], x, p, t, intercept=v[-1])
    assert np.allclose(g_miss_meanfield(w, x, p, t), lift(want), rtol=1e-12, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_flip_matches_naive(n, seed):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(n))
    p = rng.uniform(0, 0.45, n)
    w = random_simplex_point(2 * (n - 1) + 1, rng.uniform(0.1, 3), rng)
    x = rng.choice(np.array([-1, 1], dtype=np.int8), n)
    want = naive_flip(simplex_to_ball(w), x, p, t)
    assert np.allclose(g_flip(w, x, p, t), lift(want), rtol=1e-12, atol=1e-14)


def test_exact_zero_factor():
    # exp(-v_j x_t x_j) == p_j makes one shared factor exactly zero
    p = np.array([math.exp(-0.5), 0.2, 0.1, 0.3])
    v = np.array([0.5, 0.2, -0.1])
    w = ball_to_simplex(v, 1.0)
    x = np.array([1, -1, 1, 1], dtype=np.int8)
    g = g_miss(w, x, p, 3)
    want = naive_miss(v, x, p, 3)
    assert np.all(np.isfinite(g))
    assert np.allclose(g[:3], want, rtol=1e-12, atol=1e-15)
    assert g[1] == 0.0 and g[2] == 0.0 and g[0] != 0.0


# -- structural properties ----------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["miss", "flip", "mf"]), st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_antisymmetric_with_zero_slack(which, n, seed):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(n))
    if which == "flip":
        fn, dim, x = g_flip, 2 * (n - 1) + 1, rng.choice(np.array([-1, 1], dtype=np.int8), n)
        p = rng.uniform(0, 0.45, n)
    else:
        fn = g_miss if which == "miss" else g_miss_meanfield
        dim = 2 * (n - 1 + (which == "mf")) + 1
        x = rng.choice(np.array([-1, 0, 1], dtype=np.int8), n)
        p = rng.uniform(0, 0.9, n)
    g = fn(random_simplex_point(dim, 1.0, rng), x, p, t)
    k = dim // 2
    assert g[-1] == 0.0
    assert np.array_equal(g[:k], -g[k:2 * k])


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_clean_reduction(n, seed):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(n))
    z = rng.choice(np.array([-1, 1], dtype=np.int8), n)
    w = random_simplex_point(2 * (n - 1) + 1, 1.5, rng)
    want = iso_gradient_empirical(z[None, :], t, simplex_to_ball(w))
    zero = np.zeros(n)
    assert np.allclose(g_miss(w, z, zero, t)[:n - 1], want, rtol=1e-12, atol=1e-12)
    assert np.allclose(g_flip(w, z, zero, t)[:n - 1], want, rtol=1e-12, atol=1e-12)


def test_meanfield_reduces_without_intercept(rng):
    for _ in range(20):
        n = int(rng.integers(2, 7))
        t = int(rng.integers(n))
        p = rng.uniform(0, 0.8, n)
        x = rng.choice(np.array([-1, 0, 1], dtype=np.int8), n)
        v = rng.uniform(-0.2, 0.2, n - 1)
        mf = g_miss_meanfield(ball_to_simplex(np.append(v, 0.0), 2.0), x, p, t)
        plain = g_miss(ball_to_simplex(v, 2.0), x, p, t)
        assert np.allclose(mf[:n - 1], plain[:n - 1], rtol=1e-14, atol=1e-15)


def test_meanfield_zero_target_gives_zero(rng):
    x = np.array([1, 0, -1], dtype=np.int8)
    g = g_miss_meanfield(random_simplex_point(7, 1.0, rng), x, [0.2] * 3, 1)
    assert np.array_equal(g, np.zeros(7))


# -- unbiasedness by enumeration ---------------------------------------------

def _model3(rng, theta=None):
    m = random_model(3, rng, scale=0.4)
    return new_model(m.A, theta)


def test_missing_unbiased(rng):
    m = _model3(rng)
    prob = ScreeningProblem(m, 2)
    w = random_simplex_point(5, prob.lambda_budget, rng)
    got = exact_estimator_expectation(m, CorruptionChannel.uniform(MISSING, 0.25, 3), w, 2)
    assert np.max(np.abs(got - iso_gradient_exact(prob, w))) <= 1e-10


def test_flip_unbiased(rng):
    m = _model3(rng)
    prob = ScreeningProblem(m, 0)
    w = random_simplex_point(5, prob.lambda_budget, rng)
    got = exact_estimator_expectation(m, CorruptionChannel.uniform(FLIP, 0.2, 3), w, 0)
    assert np.max(np.abs(got - iso_gradient_exact(prob, w))) <= 1e-10


def test_meanfield_unbiased(rng):
    m = _model3(rng, theta=[0.1, -0.2, 0.3])
    prob = ScreeningProblem(m, 1, mean_field=True)
    w = random_simplex_point(7, prob.lambda_budget, rng)
    got = exact_estimator_expectation(m, CorruptionChannel.uniform(MISSING, 0.2, 3), w, 1, mean_field=True)
    assert np.max(np.abs(got - iso_gradient_exact(prob, w))) <= 1e-10


def test_literal_own_factor_is_biased():
    # x_i * sigma(p_i, a, x_i) as a coordinate's own factor does not average
    # to z_i e^{a z_i} under flips, so the estimate drifts off the gradient
    m = new_model([[0, 0.4, 0.2], [0.4, 0, -0.3], [0.2, -0.3, 0]])
    t, p = 2, np.array([0.2, 0.2, 0.2])
    prob = ScreeningProblem(m, t)
    w = ball_to_simplex([0.4, -0.3], prob.lambda_budget)
    w = 0.5 * w + 0.5 * random_simplex_point(5, prob.lambda_budget, np.random.default_rng(0))
    v = simplex_to_ball(w)
    dist = exact_probabilities(m)
    Z = all_configurations(3)
    literal = np.zeros(2)
    corrected = np.zeros(2)
    for z, pz in zip(Z, dist.probabilities):
        for c in Z:
            pc = np.prod(np.where(c > 0, 1 - p, p))
            x = (c * z).astype(np.int8)
            literal += pz * pc * naive_flip(v, x, p, t, own=literal_own_factor)
            corrected += pz * pc * naive_flip(v, x, p, t)
    want = iso_gradient_exact(prob, w)[:2]
    assert np.allclose(corrected, want, atol=1e-12)
    assert np.max(np.abs(literal - want)) > 0.05


# -- dispatch and validation --------------------------------------------------

def test_dispatch():
    assert estimator_for(MISSING) is g_miss
    assert estimator_for(MISSING, mean_field=True) is g_miss_meanfield
    assert estimator_for(FLIP) is g_flip
    with pytest.raises(NotImplementedError):
        estimator_for(FLIP, mean_field=True)


def test_flip_rejects_missing_entries():
    with pytest.raises(WrongChannelError):
        g_flip(np.full(3, 1 / 3), [0, 1], [0.1, 0.1], 1)


def test_dimension_checked():
    with pytest.raises(BadDimensionError):
        g_miss(np.full(5, 0.2), [1, 1], [0.1, 0.1], 0)


def test_probability_length_checked():
    with pytest.raises(BadProbabilityError):
        g_miss(np.full(3, 1 / 3), [1, 1], [0.1, 0.1, 0.1], 0)
