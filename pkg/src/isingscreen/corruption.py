"""Independent-failure channels and the sample file format.

Missing entries are stored as ``0`` so the estimators can consume corrupted
vectors directly; on disk they are written as ``?``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadProbabilityError, EmptyInputError, FileFormatError, WrongChannelError

MISSING = "missing"
FLIP = "flip"
CLEAN = "clean"
CHANNELS = (MISSING, FLIP)


def _as_probabilities(p, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 0:
        p = np.full(n, float(p))
    if p.shape != (n,):
        raise BadProbabilityError(f"expected {n} failure probabilities, got shape {p.shape}")
    return p


def check_probabilities(kind: str, p) -> np.ndarray:
    """Validate ``p`` for a channel kind; returns it as a float array."""
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    if kind == MISSING:
        ok = (p >= 0) & (p < 1)
        legal = "[0, 1)"
    elif kind == FLIP:
        # 1 - 2p appears in every flip denominator
        ok = (p >= 0) & (p < 0.5)
        legal = "[0, 1/2)"
    else:
        raise WrongChannelError(f"unknown channel {kind!r}")
    if not np.all(ok):
        raise BadProbabilityError(f"{kind} probabilities must lie in {legal}, got {p}")
    return p


@dataclass(frozen=True)
class CorruptionChannel:
    kind: str
    p: np.ndarray

    def __post_init__(self):
        p = check_probabilities(self.kind, self.p).copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def uniform(cls, kind: str, p: float, n: int) -> "CorruptionChannel":
        return cls(kind, np.full(n, float(p)))

    @property
    def p_max(self) -> float:
        return float(self.p.max()) if self.p.size else 0.0

    def apply(self, samples, rng: np.random.Generator) -> np.ndarray:
        if self.kind == MISSING:
            return corrupt_missing(samples, self.p, rng)
        return corrupt_flip(samples, self.p, rng)


def corrupt_missing(samples, p, rng: np.random.Generator) -> np.ndarray:
    """Zero each entry independently with probability ``p_i``.

    ``samples`` is one spin vector or an ``(m, n)`` array; ``p`` is a scalar
    or a length-n vector. One uniform is drawn per entry.
    """
    z = np.asarray(samples, dtype=np.int8)
    p = check_probabilities(MISSING, _as_probabilities(p, z.shape[-1]))
    lost = rng.random(z.shape) < p
    return np.where(lost, np.int8(0), z).astype(np.int8)


def corrupt_flip(samples, p, rng: np.random.Generator) -> np.ndarray:
    """Negate each entry independently with probability ``p_i``."""
    z = np.asarray(samples, dtype=np.int8)
    p = check_probabilities(FLIP, _as_probabilities(p, z.shape[-1]))
    flipped = rng.random(z.shape) < p
    return np.where(flipped, -z, z).astype(np.int8)


@dataclass
class SampleSet:
    """Rows of observed vectors plus the channel that produced them."""

    values: np.ndarray
    channel: str = CLEAN

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=np.int8))
        if self.channel not in (CLEAN, MISSING, FLIP):
            raise FileFormatError(f"unknown channel {self.channel!r}")
        if self.channel != MISSING and self.values.size and np.any(self.values == 0):
            raise FileFormatError("0 entries are only legal for the missing channel")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def estimate_p(samples) -> float:
    """Fraction of missing entries, assuming one shared failure rate.

    Accepts a :class:`SampleSet` (which must come from the missing channel)
    or a raw ``(m, n)`` array with zeros marking missing entries.
    """
    if isinstance(samples, SampleSet):
        if samples.channel == FLIP:
            raise WrongChannelError("missing rate cannot be estimated from flipped data")
        values = samples.values
    else:
        values = np.atleast_2d(np.asarray(samples))
    if values.size == 0:
        raise EmptyInputError("no samples to estimate p from")
    return float(np.count_nonzero(values == 0) / values.size)


def missing_rate_tail_bound(p: float, m: int, n: int, eps: float) -> float:
    """exp(-m n eps^2 / (2 p (1 - p))), the deviation tail used for p-hat."""
    if p <= 0 or p >= 1:
        return 0.0
    return math.exp(-m * n * eps**2 / (2 * p * (1 - p)))


def missing_rate_deviation(p: float, m: int, n: int, delta: float) -> float:
    """Deviation ``eps`` at which :func:`missing_rate_tail_bound` equals ``delta``."""
    return math.sqrt(2 * p * (1 - p) * math.log(1 / delta) / (m * n))


# -- sample files ------------------------------------------------------------

# indexed by value + 1
_TOKENS = np.array(["-1", "?", "1"])


def write_samples(samples: SampleSet, path) -> None:
    lines = [f"#channel={samples.channel}"]
    if len(samples):
        tok = _TOKENS[samples.values.astype(np.int64) + 1]
        lines.extend(" ".join(row) for row in tok)
    Path(path).write_text("\n".join(lines) + "\n")


def read_samples(path) -> SampleSet:
    text = Path(path).read_text()
    header, _, body = text.partition("\n")
    header = header.strip()
    if not header.startswith("#channel="):
        raise FileFormatError(f"{path}: missing '#channel=' header")
    channel = header[len("#channel="):].strip()
    if channel not in (CLEAN, MISSING, FLIP):
        raise FileFormatError(f"{path}: unknown channel {channel!r}")
    rows = [line.split() for line in body.splitlines() if line.strip()]
    if not rows:
        return SampleSet(np.zeros((0, 0), dtype=np.int8), channel)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FileFormatError(f"{path}: rows have differing lengths")
    tok = np.array(rows)
    bad = ~np.isin(tok, _TOKENS)
    if bad.any():
        raise FileFormatError(f"{path}: illegal token {tok[bad][0]!r}")
    if channel != MISSING and np.any(tok == "?"):
        raise FileFormatError(f"{path}: '?' only allowed in missing-channel files")
    values = np.where(tok == "1", 1, np.where(tok == "-1", -1, 0)).astype(np.int8)
    return SampleSet(values, channel)
