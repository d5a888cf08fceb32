import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingscreen.corruption import (
    FLIP,
    MISSING,
    CorruptionChannel,
    SampleSet,
    corrupt_flip,
    corrupt_missing,
    estimate_p,
    missing_rate_deviation,
    missing_rate_tail_bound,
    read_samples,
    write_samples,
)
from isingscreen.errors import BadProbabilityError, EmptyInputError, FileFormatError, WrongChannelError


def spins(m, n, rng):
    return rng.choice(np.array([-1, 1], dtype=np.int8), (m, n))


class TestMissing:
    def test_zero_rate_is_identity(self, rng):
        z = spins(50, 6, rng)
        assert np.array_equal(corrupt_missing(z, 0.0, rng), z)

    def test_near_one_rate(self, rng):
        x = corrupt_missing(spins(10, 4, rng), 1 - 1e-9, rng)
        assert np.count_nonzero(x) <= 1

    def test_frequency(self, rng):
        x = corrupt_missing(spins(10**5, 4, rng), 0.25, rng)
        assert np.all(np.abs((x == 0).mean(axis=0) - 0.25) <= 0.005)

    def test_kept_entries_unchanged(self, rng):
        z = spins(200, 5, rng)
        x = corrupt_missing(z, [0.1, 0.2, 0.3, 0.4, 0.5], rng)
        kept = x != 0
        assert np.array_equal(x[kept], z[kept])

    @pytest.mark.parametrize("p", [-0.1, 1.0, 1.5])
    def test_rejects_bad_rate(self, rng, p):
        with pytest.raises(BadProbabilityError):
            corrupt_missing(spins(3, 3, rng), p, rng)

    def test_single_vector(self, rng):
        x = corrupt_missing(np.array([1, -1, 1], dtype=np.int8), 0.5, rng)
        assert x.shape == (3,)


class TestFlip:
    def test_zero_rate_is_identity(self, rng):
        z = spins(50, 6, rng)
        assert np.array_equal(corrupt_flip(z, 0.0, rng), z)

    def test_frequency(self, rng):
        z = spins(10**5, 4, rng)
        x = corrupt_flip(z, 0.4, rng)
        assert np.all(np.abs((x != z).mean(axis=0) - 0.4) <= 0.005)
        assert np.all(x != 0)

    @pytest.mark.parametrize("p", [0.5, 0.7, -0.01])
    def test_rejects_bad_rate(self, rng, p):
        with pytest.raises(BadProbabilityError):
            corrupt_flip(spins(3, 3, rng), p, rng)

    def test_no_flip_stream_leaves_ones(self):
        ones = np.ones((2, 5), dtype=np.int8)
        # p = 0.1 with a seed whose first ten uniforms all exceed 0.1
        seed = next(s for s in range(1000) if np.all(np.random.default_rng(s).random((2, 5)) >= 0.1))
        assert np.array_equal(corrupt_flip(ones, 0.1, np.random.default_rng(seed)), ones)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([MISSING, FLIP]))
def test_one_uniform_per_entry(seed, kind):
    # the mask at (r, i) depends only on the r-th row's i-th uniform
    rng = np.random.default_rng(seed)
    p = rng.uniform(0, 0.45, 6)
    z = spins(40, 6, rng)
    u = np.random.default_rng(seed + 1).random(z.shape)
    x = CorruptionChannel(kind, p).apply(z, np.random.default_rng(seed + 1))
    hit = u < p
    want = np.where(hit, 0 if kind == MISSING else -z, z)
    assert np.array_equal(x, want)


def test_permutation_equivariance_in_distribution(rng):
    p = np.array([0.05, 0.15, 0.3, 0.45])
    perm = np.array([2, 0, 3, 1])
    z = np.ones((2 * 10**5, 4), dtype=np.int8)
    direct = corrupt_missing(z, p, rng)
    permuted = corrupt_missing(z[:, perm], p[perm], rng)[:, np.argsort(perm)]
    assert np.allclose((direct == 0).mean(0), (permuted == 0).mean(0), atol=0.005)
    # pairwise joint rates also agree
    jd = ((direct[:, 0] == 0) & (direct[:, 3] == 0)).mean()
    jp = ((permuted[:, 0] == 0) & (permuted[:, 3] == 0)).mean()
    assert jd == pytest.approx(jp, abs=0.003)


class TestChannel:
    def test_p_max(self):
        c = CorruptionChannel(MISSING, [0.1, 0.6, 0.2])
        assert c.p_max == 0.6

    def test_immutable_rates(self):
        c = CorruptionChannel.uniform(FLIP, 0.2, 3)
        with pytest.raises(ValueError):
            c.p[0] = 0.4

    def test_unknown_kind(self):
        with pytest.raises(WrongChannelError):
            CorruptionChannel("erase", [0.1])


class TestEstimateP:
    def test_no_missing(self):
        assert estimate_p(np.ones((4, 3))) == 0.0

    def test_all_missing(self):
        assert estimate_p(np.zeros((4, 3))) == 1.0

    def test_arithmetic(self):
        x = np.ones((3, 4), dtype=np.int8)
        x[0, 1] = x[1, 2] = x[2, 0] = 0
        assert estimate_p(SampleSet(x, MISSING)) == 0.25

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            estimate_p(np.zeros((0, 4)))

    def test_flip_rejected(self):
        with pytest.raises(WrongChannelError):
            estimate_p(SampleSet(np.ones((2, 2)), FLIP))


def test_deviation_inverts_tail():
    eps = missing_rate_deviation(0.2, 10**4, 8, 0.01)
    assert missing_rate_tail_bound(0.2, 10**4, 8, eps) == pytest.approx(0.01)
    assert eps == pytest.approx(math.sqrt(0.32 * math.log(100) / 8e4))


def test_missing_rate_concentration(rng):
    # deviation beyond the 99% bound in at most 2% of 1000 trials
    m, n, p = 1000, 8, 0.2
    eps = missing_rate_deviation(p, m, n, 0.01)
    ones = np.ones((m, n), dtype=np.int8)
    bad = sum(abs(estimate_p(corrupt_missing(ones, p, rng)) - p) > eps for _ in range(1000))
    assert bad <= 20


class TestSampleFiles:
    def test_round_trip_missing(self, tmp_path, rng):
        x = corrupt_missing(spins(30, 5, rng), 0.3, rng)
        write_samples(SampleSet(x, MISSING), tmp_path / "s.txt")
        back = read_samples(tmp_path / "s.txt")
        assert back.channel == MISSING
        assert np.array_equal(back.values, x)
        text = (tmp_path / "s.txt").read_text()
        assert text.startswith("#channel=missing\n") and "?" in text

    def test_header_only(self, tmp_path):
        (tmp_path / "e.txt").write_text("#channel=clean\n")
        assert len(read_samples(tmp_path / "e.txt")) == 0

    @pytest.mark.parametrize("body", [
        "1 -1\n",
        "#channel=clean\n1 ? \n",
        "#channel=flip\n1 0\n",
        "#channel=missing\n1 -1\n1\n",
        "#channel=bogus\n1 1\n",
    ])
    def test_rejects_malformed(self, tmp_path, body):
        (tmp_path / "bad.txt").write_text(body)
        with pytest.raises(FileFormatError):
            read_samples(tmp_path / "bad.txt")

    def test_zero_only_for_missing(self):
        with pytest.raises(FileFormatError):
            SampleSet(np.array([[1, 0]]), FLIP)
