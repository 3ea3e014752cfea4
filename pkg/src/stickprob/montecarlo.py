"""Seeded Monte Carlo estimates of the polygon-formation probabilities.

Randomness is counter-based: trial t always consumes the same fixed-size
slice of a Philox stream for a given seed, so an estimate is bit identical
however the trials are chunked or spread over workers.  Per-trial draws
are derived from raw 64-bit words (uniforms from the top 53 bits,
exponentials through the inverse CDF) instead of stateful generator
methods, which keeps the word budget per trial constant.

Floating point is deliberate here: the Monte Carlo error at any feasible
trial count dwarfs rounding error.  Exactness lives in the closed forms
and the symbolic oracle.

Tie rule, fixed for reproducibility: a degenerate flat polygon does not
count as formed.  "Cannot form" tests use window sums <= the next length;
"forms" is the strict complement.  Ties have measure zero under every
supported distribution.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "UNIFORM01",
    "UNIFORM_TRUNCATED",
    "EXPONENTIAL",
    "BROKEN_STICK",
    "NO_POLYGON",
    "ALL_POLYGON",
    "RANDOM_SUBSET_POLYGON",
    "DistributionSpec",
    "EventSpec",
    "MCEstimate",
    "sample_lengths",
    "no_polygon",
    "all_polygon",
    "random_subset_polygon",
    "estimate",
]

UNIFORM01 = "uniform01"
UNIFORM_TRUNCATED = "uniform_truncated"
EXPONENTIAL = "exponential"
BROKEN_STICK = "broken_stick"
_DIST_KINDS = (UNIFORM01, UNIFORM_TRUNCATED, EXPONENTIAL, BROKEN_STICK)

NO_POLYGON = "no_polygon"
ALL_POLYGON = "all_polygon"
RANDOM_SUBSET_POLYGON = "random_subset_polygon"
_EVENT_KINDS = (NO_POLYGON, ALL_POLYGON, RANDOM_SUBSET_POLYGON)

_WORDS_PER_BLOCK = 4  # Philox4x64 words per counter increment
_TRIALS_PER_CHUNK = 1 << 16
_UNIT = 2.0**-53  # top 53 bits of a word -> [0, 1)


@dataclass(frozen=True)
class DistributionSpec:
    """Sampling model for the stick lengths."""

    kind: str
    a: float = 0.0
    rate: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _DIST_KINDS:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if self.kind == UNIFORM_TRUNCATED and not 0.0 <= self.a < 1.0:
            raise DomainError(f"truncation point must lie in [0, 1), got {self.a}")
        if self.kind == EXPONENTIAL and not self.rate > 0.0:
            raise DomainError(f"rate must be positive, got {self.rate}")

    @classmethod
    def uniform01(cls) -> "DistributionSpec":
        return cls(UNIFORM01)

    @classmethod
    def uniform_truncated(cls, a: float) -> "DistributionSpec":
        return cls(UNIFORM_TRUNCATED, a=float(a))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "DistributionSpec":
        return cls(EXPONENTIAL, rate=float(rate))

    @classmethod
    def broken_stick(cls) -> "DistributionSpec":
        return cls(BROKEN_STICK)

    def uniforms_per_trial(self, n: int) -> int:
        # a broken stick with n pieces needs only its n-1 cut points
        return n - 1 if self.kind == BROKEN_STICK else n


@dataclass(frozen=True)
class EventSpec:
    """Which polygon-formation event a trial scores."""

    kind: str
    p: int

    def __post_init__(self) -> None:
        if self.kind not in _EVENT_KINDS:
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.p < 2:
            raise DomainError(f"polygon parameter p must be >= 2, got {self.p}")

    def uniforms_per_trial(self) -> int:
        # subset selection burns one word per pick
        return self.p + 1 if self.kind == RANDOM_SUBSET_POLYGON else 0


@dataclass(frozen=True)
class MCEstimate:
    """Point estimate with its binomial standard error."""

    p_hat: float
    trials: int
    std_err: float
    seed: int
    event: EventSpec
    dist: DistributionSpec
    successes: int


def _lengths_from_uniforms(
    dist: DistributionSpec, n: int, u: np.ndarray
) -> np.ndarray:
    """Map rows of uniforms to rows of sorted lengths."""
    if dist.kind == UNIFORM01:
        x = u
    elif dist.kind == UNIFORM_TRUNCATED:
        x = dist.a + (1.0 - dist.a) * u
    elif dist.kind == EXPONENTIAL:
        x = -np.log1p(-u) / dist.rate
    else:
        cuts = np.sort(u, axis=1)
        x = np.diff(cuts, axis=1, prepend=0.0, append=1.0)
    return np.sort(x, axis=1)


def sample_lengths(dist: DistributionSpec, n: int, stream) -> np.ndarray:
    """Draw one set of n lengths, sorted nondecreasing.

    ``stream`` needs a numpy-style ``random(size)`` method returning
    uniforms in [0, 1); a ``numpy.random.Generator`` works.
    """
    if n < 1:
        raise DomainError(f"stick count n must be >= 1, got {n}")
    k = dist.uniforms_per_trial(n)
    u = np.asarray(stream.random(k), dtype=np.float64).reshape(1, k)
    return _lengths_from_uniforms(dist, n, u)[0]


def _as_sorted_array(lengths) -> np.ndarray:
    arr = np.asarray(lengths, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError("lengths must be a one-dimensional sequence")
    if arr.size and np.any(arr[1:] < arr[:-1]):
        raise DomainError("lengths must be sorted nondecreasing")
    return arr


def _no_polygon_rows(lengths: np.ndarray, p: int) -> np.ndarray:
    n = lengths.shape[1]
    ok = np.ones(lengths.shape[0], dtype=bool)
    for i in range(n - p):
        ok &= lengths[:, i : i + p].sum(axis=1) <= lengths[:, i + p]
    return ok


def _all_polygon_rows(lengths: np.ndarray, p: int) -> np.ndarray:
    n = lengths.shape[1]
    if n <= p:
        return np.ones(lengths.shape[0], dtype=bool)
    return lengths[:, :p].sum(axis=1) > lengths[:, -1]


def no_polygon(sorted_lengths, p: int) -> bool:
    """True iff no p+1 of the lengths can form a (p+1)-gon, i.e. every
    window of p consecutive lengths sums to at most the next length.
    Vacuously true for fewer than p+1 lengths."""
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    arr = _as_sorted_array(sorted_lengths)
    return bool(_no_polygon_rows(arr.reshape(1, -1), p)[0])


def all_polygon(sorted_lengths, p: int) -> bool:
    """True iff every choice of p+1 lengths forms a (p+1)-gon.

    Equivalent to the single check that the p globally shortest lengths
    sum to strictly more than the longest: any subset's p shortest
    dominate the p globally shortest termwise, and the failing subset, if
    one exists, is the p shortest plus the longest.  Vacuously true for
    fewer than p+1 lengths.
    """
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    arr = _as_sorted_array(sorted_lengths)
    return bool(_all_polygon_rows(arr.reshape(1, -1), p)[0])


def _subset_rows(lengths: np.ndarray, p: int, u: np.ndarray) -> np.ndarray:
    m, n = lengths.shape
    idx = np.tile(np.arange(n), (m, 1))
    rows = np.arange(m)
    for s in range(p + 1):
        # partial Fisher-Yates; the min() guards the one-ulp rounding case
        j = np.minimum((u[:, s] * (n - s)).astype(np.int64), n - s - 1)
        pos = s + j
        picked = idx[rows, pos].copy()
        idx[rows, pos] = idx[rows, s]
        idx[rows, s] = picked
    subset = np.take_along_axis(lengths, idx[:, : p + 1], axis=1)
    subset.sort(axis=1)
    return subset[:, :p].sum(axis=1) > subset[:, -1]


def random_subset_polygon(sorted_lengths, p: int, stream) -> bool:
    """Draw one uniform subset of p+1 lengths; True iff that subset forms."""
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    arr = _as_sorted_array(sorted_lengths)
    n = arr.shape[0]
    if n < p + 1:
        raise DomainError(f"need at least p + 1 = {p + 1} lengths, got {n}")
    u = np.asarray(stream.random(p + 1), dtype=np.float64).reshape(1, p + 1)
    return bool(_subset_rows(arr.reshape(1, -1), p, u)[0])


def _run_chunk(
    event: EventSpec,
    dist: DistributionSpec,
    n: int,
    seed: int,
    blocks_per_trial: int,
    span: tuple[int, int],
) -> int:
    t0, t1 = span
    count = t1 - t0
    gen = np.random.Philox(key=seed, counter=t0 * blocks_per_trial)
    words = gen.random_raw(count * blocks_per_trial * _WORDS_PER_BLOCK)
    words = words.reshape(count, blocks_per_trial * _WORDS_PER_BLOCK)
    n_len = dist.uniforms_per_trial(n)
    need = n_len + event.uniforms_per_trial()
    if need:
        u = (words[:, :need] >> np.uint64(11)) * _UNIT
    else:
        u = np.empty((count, 0), dtype=np.float64)
    lengths = _lengths_from_uniforms(dist, n, u[:, :n_len])
    if event.kind == NO_POLYGON:
        ok = _no_polygon_rows(lengths, event.p)
    elif event.kind == ALL_POLYGON:
        ok = _all_polygon_rows(lengths, event.p)
    else:
        ok = _subset_rows(lengths, event.p, u[:, n_len:])
    return int(ok.sum())


def estimate(
    event: EventSpec,
    dist: DistributionSpec,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MCEstimate:
    """Estimate the event probability over independent stick draws.

    The word budget per trial is fixed up front and trial t reads Philox
    blocks [t*c, (t+1)*c) for a constant c, so the result for a given
    (seed, trials) pair does not depend on ``workers`` or on chunk
    boundaries.  Worker parallelism is a plain reduction over integer
    success counts.
    """
    if n < 1:
        raise DomainError(f"stick count n must be >= 1, got {n}")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit nonnegative integer")
    if event.kind == RANDOM_SUBSET_POLYGON and n < event.p + 1:
        raise DomainError(
            f"subset events need n >= p + 1 = {event.p + 1}, got n = {n}"
        )
    words_per_trial = dist.uniforms_per_trial(n) + event.uniforms_per_trial()
    blocks_per_trial = max(1, -(-words_per_trial // _WORDS_PER_BLOCK))
    spans = [
        (t0, min(t0 + _TRIALS_PER_CHUNK, trials))
        for t0 in range(0, trials, _TRIALS_PER_CHUNK)
    ]

    def run(span: tuple[int, int]) -> int:
        return _run_chunk(event, dist, n, seed, blocks_per_trial, span)

    if workers == 1 or len(spans) == 1:
        successes = sum(map(run, spans))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(run, spans))
    p_hat = successes / trials
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return MCEstimate(
        p_hat=p_hat,
        trials=trials,
        std_err=std_err,
        seed=seed,
        event=event,
        dist=dist,
        successes=successes,
    )
